#include "pafas/perf.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "pafas/casestudy.hpp"
#include "pafas/errors.hpp"

namespace pafas {

std::string step_label(const Step& s) {
  if (!s.is_time) return ActionTable::get().name(s.act);
  if (s.forbid.empty()) return "time";
  return "time" + aset_str(s.forbid);
}

std::string path_str(const Path& p) {
  std::string out;
  for (const Step& s : p) {
    if (!out.empty()) out += ' ';
    out += step_label(s);
  }
  return out;
}

bool replay_path(const Rts& g, const Path& p, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  int32_t at = p.empty() ? g.root : p.front().from;
  for (size_t i = 0; i < p.size(); ++i) {
    const Step& s = p[i];
    if (s.from != at) return fail("step " + std::to_string(i) + " is not contiguous");
    if (s.from < 0 || s.from >= static_cast<int32_t>(g.nodes.size()) || s.to < 0 ||
        s.to >= static_cast<int32_t>(g.nodes.size()))
      return fail("step " + std::to_string(i) + " leaves the graph");
    const RtsNode& n = g.nodes[s.from];
    if (s.is_time) {
      if (!n.time || n.time->to != s.to || n.time->forbid != s.forbid)
        return fail("step " + std::to_string(i) + ": no such time edge");
    } else {
      bool found = false;
      for (const auto& [a, to] : n.acts)
        if (a == s.act && to == s.to) { found = true; break; }
      if (!found) return fail("step " + std::to_string(i) + ": no such action edge");
    }
    at = s.to;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Tarjan SCCs (iterative). Component ids come out in reverse topological
// order: every edge goes from a component id to an equal or smaller one.

static std::vector<int32_t> scc_comp(int32_t n,
                                     const std::vector<std::vector<int32_t>>& adj,
                                     int32_t* count_out = nullptr) {
  std::vector<int32_t> idx(n, 0), low(n, 0), comp(n, -1);
  std::vector<char> onstk(n, 0);
  std::vector<int32_t> st;
  int32_t counter = 0, comps = 0;
  std::vector<std::pair<int32_t, size_t>> stack;
  for (int32_t v0 = 0; v0 < n; ++v0) {
    if (idx[v0] != 0) continue;
    stack.emplace_back(v0, 0);
    while (!stack.empty()) {
      auto [v, pi] = stack.back();
      stack.pop_back();
      if (pi == 0) {
        idx[v] = low[v] = ++counter;
        st.push_back(v);
        onstk[v] = 1;
      }
      bool descended = false;
      for (size_t i = pi; i < adj[v].size(); ++i) {
        int32_t w = adj[v][i];
        if (idx[w] == 0) {
          stack.emplace_back(v, i + 1);
          stack.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (onstk[w]) low[v] = std::min(low[v], idx[w]);
      }
      if (descended) continue;
      if (low[v] == idx[v]) {
        while (true) {
          int32_t w = st.back();
          st.pop_back();
          onstk[w] = 0;
          comp[w] = comps;
          if (w == v) break;
        }
        ++comps;
      }
      if (!stack.empty()) {
        int32_t pv = stack.back().first;
        low[pv] = std::min(low[pv], low[v]);
      }
    }
  }
  if (count_out) *count_out = comps;
  return comp;
}

// ---------------------------------------------------------------------------
// reduce_rts

Rts reduce_rts(const Rts& g, ReduceStats* stats) {
  const ActionId ain = actions().in, aout = actions().out;
  const int32_t n = static_cast<int32_t>(g.nodes.size());
  const int64_t bal_cap = 2 * static_cast<int64_t>(n) + 2;

  // Surviving time edges; an edge forbidding both in and out can never fire
  // in any composition with a user, so it goes immediately.
  std::vector<char> alive(n, 0);
  size_t initial_time = 0;
  for (int32_t v = 0; v < n; ++v) {
    if (!g.nodes[v].time) continue;
    ++initial_time;
    const ActionSet& u = g.nodes[v].time->forbid;
    if (!(aset_has(u, ain) && aset_has(u, aout))) alive[v] = 1;
  }

  int rounds = 0;
  std::vector<char> zero(n), pos(n);
  while (true) {
    ++rounds;
    std::fill(zero.begin(), zero.end(), 0);
    std::fill(pos.begin(), pos.end(), 0);
    // BFS over (node, in-out balance) pairs: which balances can reach a node?
    std::vector<char> seen(static_cast<size_t>(n) * (bal_cap + 1), 0);
    std::deque<std::pair<int32_t, int64_t>> q;
    auto push = [&](int32_t v, int64_t b) {
      if (b < 0 || b > bal_cap) return;
      size_t key = static_cast<size_t>(v) * (bal_cap + 1) + b;
      if (seen[key]) return;
      seen[key] = 1;
      q.emplace_back(v, b);
    };
    push(g.root, 0);
    while (!q.empty()) {
      auto [v, b] = q.front();
      q.pop_front();
      if (b == 0) zero[v] = 1;
      if (b >= 1) pos[v] = 1;
      for (const auto& [a, to] : g.nodes[v].acts)
        push(to, b + (a == ain ? 1 : a == aout ? -1 : 0));
      if (alive[v]) push(g.nodes[v].time->to, b);
    }
    // Usability: an edge forbidding in needs a phase with requests pending
    // (balance >= 1 reachable); one forbidding out needs a quiet phase.
    bool changed = false;
    for (int32_t v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      const ActionSet& u = g.nodes[v].time->forbid;
      if ((aset_has(u, ain) && !pos[v]) || (aset_has(u, aout) && !zero[v])) {
        alive[v] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }

  Rts pruned = g;
  size_t surviving = 0;
  for (int32_t v = 0; v < n; ++v) {
    if (alive[v]) ++surviving;
    else pruned.nodes[v].time.reset();
  }
  std::vector<bool> keep_vec(reachable_nodes(pruned));
  size_t kept = static_cast<size_t>(std::count(keep_vec.begin(), keep_vec.end(), true));
  if (stats) {
    stats->removed_time_edges = initial_time - surviving;
    stats->removed_nodes = g.nodes.size() - kept;
    stats->rounds = rounds;
  }
  return restrict_nodes(pruned, keep_vec);
}

// ---------------------------------------------------------------------------
// check_response

ResponseResult check_response(const Rts& g) {
  const ActionId ain = actions().in, aout = actions().out;
  const int32_t n = static_cast<int32_t>(g.nodes.size());
  const int64_t inf = INT64_MAX / 4;
  std::vector<int64_t> dist(n, inf);
  // Relaxation log so a witness can be rebuilt even while a negative cycle
  // is being pumped: each entry remembers the step taken and the log entry
  // that produced its source distance.
  struct LogEntry {
    Step step;
    int32_t prev;
  };
  std::vector<LogEntry> log;
  std::vector<int32_t> last(n, -2);  // -2 unset, -1 root seed
  dist[g.root] = 0;
  last[g.root] = -1;
  std::deque<int32_t> q{g.root};
  std::vector<char> inq(n, 0);
  inq[g.root] = 1;

  auto violation = [&](int32_t log_idx) {
    Path p;
    for (int32_t i = log_idx; i >= 0; i = log[i].prev) p.push_back(log[i].step);
    std::reverse(p.begin(), p.end());
    return ResponseResult{false, std::move(p)};
  };

  while (!q.empty()) {
    int32_t v = q.front();
    q.pop_front();
    inq[v] = 0;
    int64_t dv = dist[v];
    int32_t src_log = last[v];
    auto relax = [&](int32_t to, int64_t w, const Step& step) -> int32_t {
      if (dv + w >= dist[to]) return -1;
      dist[to] = dv + w;
      log.push_back({step, src_log});
      last[to] = static_cast<int32_t>(log.size()) - 1;
      if (dist[to] < 0) return last[to];
      if (!inq[to]) {
        inq[to] = 1;
        q.push_back(to);
      }
      return -1;
    };
    for (const auto& [a, to] : g.nodes[v].acts) {
      int64_t w = a == ain ? 1 : a == aout ? -1 : 0;
      Step s;
      s.act = a;
      s.from = v;
      s.to = to;
      int32_t bad = relax(to, w, s);
      if (bad >= 0) return violation(bad);
    }
    if (g.nodes[v].time) {
      Step s;
      s.is_time = true;
      s.forbid = g.nodes[v].time->forbid;
      s.from = v;
      s.to = g.nodes[v].time->to;
      int32_t bad = relax(s.to, 0, s);
      if (bad >= 0) return violation(bad);
    }
  }
  return ResponseResult{};
}

// ---------------------------------------------------------------------------
// find_catastrophic

std::optional<CatWitness> find_catastrophic(const Rts& rr) {
  const ActionId ain = actions().in, aout = actions().out;
  const int32_t n = static_cast<int32_t>(rr.nodes.size());
  // Graph for the cycle search: everything except in/out action edges.
  std::vector<std::vector<Step>> adj(n);
  for (int32_t v = 0; v < n; ++v) {
    for (const auto& [a, to] : rr.nodes[v].acts) {
      if (a == ain || a == aout) continue;
      Step s;
      s.act = a;
      s.from = v;
      s.to = to;
      adj[v].push_back(s);
    }
    if (rr.nodes[v].time) {
      Step s;
      s.is_time = true;
      s.forbid = rr.nodes[v].time->forbid;
      s.from = v;
      s.to = rr.nodes[v].time->to;
      adj[v].push_back(s);
    }
  }
  std::vector<std::vector<int32_t>> plain(n);
  for (int32_t v = 0; v < n; ++v)
    for (const Step& s : adj[v]) plain[v].push_back(s.to);
  std::vector<int32_t> comp = scc_comp(n, plain);

  for (int32_t v = 0; v < n; ++v) {
    if (!rr.nodes[v].time) continue;
    int32_t to = rr.nodes[v].time->to;
    if (comp[v] != comp[to]) continue;
    // Close the cycle: time edge v -> to, then a path back to v that stays
    // inside the component.
    Path cycle;
    Step ts;
    ts.is_time = true;
    ts.forbid = rr.nodes[v].time->forbid;
    ts.from = v;
    ts.to = to;
    cycle.push_back(ts);
    if (to != v) {
      std::vector<char> seen(n, 0);
      std::vector<Step> par_step(n);
      std::deque<int32_t> q{to};
      seen[to] = 1;
      while (!q.empty() && !seen[v]) {
        int32_t x = q.front();
        q.pop_front();
        for (const Step& s : adj[x]) {
          if (comp[s.to] != comp[v] || seen[s.to]) continue;
          seen[s.to] = 1;
          par_step[s.to] = s;
          q.push_back(s.to);
        }
      }
      if (!seen[v]) throw InternalError("catastrophic SCC lost its return path");
      Path back;
      for (int32_t x = v; x != to; x = par_step[x].from) back.push_back(par_step[x]);
      std::reverse(back.begin(), back.end());
      cycle.insert(cycle.end(), back.begin(), back.end());
    }
    return CatWitness{std::move(cycle)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// asymptotic_performance

namespace {

// Subgraph G: only full time steps, restricted to what stays reachable.
Rts graph_full(const Rts& rr, std::vector<int32_t>* orig) {
  Rts g = rr;
  for (auto& node : g.nodes)
    if (node.time && !node.time->full()) node.time.reset();
  return restrict_nodes(g, reachable_nodes(g), orig);
}

struct GpEdge {
  int32_t u;   // start node in G
  int32_t vp;  // target: full step's destination
  int32_t v;   // full step's source (end of the action path)
  int32_t w;   // in-count of the shortest action path u ~> v
};

constexpr int32_t kInf32 = 0x3f3f3f3f;

// Shortest 0/1 path from src over the action edges of G (in = 1, rest = 0);
// parents kept for expansion.
void zero_one_bfs(const Rts& g, int32_t src, std::vector<int32_t>& dist,
                  std::vector<std::pair<int32_t, ActionId>>* parent,
                  bool reversed) {
  const ActionId ain = actions().in;
  const int32_t n = static_cast<int32_t>(g.nodes.size());
  struct E {
    int32_t to;
    int32_t w;
    ActionId a;
  };
  std::vector<std::vector<E>> adj(n);
  for (int32_t v = 0; v < n; ++v)
    for (const auto& [a, to] : g.nodes[v].acts) {
      int32_t w = a == ain ? 1 : 0;
      if (reversed) adj[to].push_back({v, w, a});
      else adj[v].push_back({to, w, a});
    }
  dist.assign(n, kInf32);
  if (parent) parent->assign(n, {-1, kTau});
  dist[src] = 0;
  std::deque<int32_t> dq{src};
  std::vector<char> done(n, 0);
  while (!dq.empty()) {
    int32_t v = dq.front();
    dq.pop_front();
    if (done[v]) continue;
    done[v] = 1;
    for (const E& e : adj[v]) {
      if (dist[v] + e.w < dist[e.to]) {
        dist[e.to] = dist[v] + e.w;
        if (parent) (*parent)[e.to] = {v, e.a};
        if (e.w == 0) dq.push_front(e.to);
        else dq.push_back(e.to);
      }
    }
  }
}

// Expands one composite edge to concrete steps in rr's node ids: the
// shortest action path u ~> v inside G, then the full step v -> vp.
void expand_gp_edge(const Rts& g, const std::vector<int32_t>& orig,
                    const GpEdge& e, Path& out) {
  std::vector<int32_t> dist;
  std::vector<std::pair<int32_t, ActionId>> parent;
  zero_one_bfs(g, e.u, dist, &parent, false);
  if (dist[e.v] != e.w) throw InternalError("bad-cycle expansion distance mismatch");
  Path seg;
  for (int32_t x = e.v; x != e.u; x = parent[x].first) {
    Step s;
    s.act = parent[x].second;
    s.from = orig[parent[x].first];
    s.to = orig[x];
    seg.push_back(s);
  }
  std::reverse(seg.begin(), seg.end());
  out.insert(out.end(), seg.begin(), seg.end());
  Step t;
  t.is_time = true;
  t.from = orig[e.v];
  t.to = orig[e.vp];
  out.push_back(t);
}

}  // namespace

AsymResult asymptotic_performance(const Rts& rr, Method method) {
  const ActionId ain = actions().in;
  AsymResult res;
  std::vector<int32_t> orig;
  Rts g = graph_full(rr, &orig);
  const int32_t n = static_cast<int32_t>(g.nodes.size());

  std::vector<std::pair<int32_t, int32_t>> fulls;  // (v, vp)
  for (int32_t v = 0; v < n; ++v)
    if (g.nodes[v].time) fulls.emplace_back(v, g.nodes[v].time->to);

  std::vector<GpEdge> gp;
  if (method == Method::kBaseline) {
    // All-pairs distances over the action edges.
    std::vector<int32_t> d(static_cast<size_t>(n) * n, kInf32);
    for (int32_t i = 0; i < n; ++i) d[static_cast<size_t>(i) * n + i] = 0;
    for (int32_t v = 0; v < n; ++v)
      for (const auto& [a, to] : g.nodes[v].acts) {
        int32_t w = a == ain ? 1 : 0;
        int32_t& cell = d[static_cast<size_t>(v) * n + to];
        if (w < cell) cell = w;
      }
    for (int32_t k = 0; k < n; ++k) {
      const int32_t* dk = &d[static_cast<size_t>(k) * n];
      for (int32_t i = 0; i < n; ++i) {
        int32_t dik = d[static_cast<size_t>(i) * n + k];
        if (dik >= kInf32) continue;
        int32_t* di = &d[static_cast<size_t>(i) * n];
        for (int32_t j = 0; j < n; ++j) {
          int32_t v = dik + dk[j];
          if (v < di[j]) di[j] = v;
        }
      }
    }
    for (const auto& [v, vp] : fulls)
      for (int32_t u = 0; u < n; ++u) {
        int32_t w = d[static_cast<size_t>(u) * n + v];
        if (w < kInf32) gp.push_back({u, vp, v, w});
      }
  } else {
    // One cheap Dijkstra (0/1 weights: deque) per full step, on the
    // reversed action graph; gives d(u, v) for all u at once.
    std::vector<int32_t> dist;
    for (const auto& [v, vp] : fulls) {
      zero_one_bfs(g, v, dist, nullptr, true);
      for (int32_t u = 0; u < n; ++u)
        if (dist[u] < kInf32) gp.push_back({u, vp, v, dist[u]});
    }
  }
  std::sort(gp.begin(), gp.end(), [](const GpEdge& a, const GpEdge& b) {
    return std::tie(a.u, a.vp, a.w, a.v) < std::tie(b.u, b.vp, b.w, b.v);
  });

  res.sizes.g_nodes = static_cast<size_t>(n);
  res.sizes.g_action_edges = g.action_edge_count();
  res.sizes.g_full_steps = fulls.size();
  res.sizes.gp_nodes = static_cast<size_t>(n);
  res.sizes.gp_edges = gp.size();

  // Karp's minimum mean cycle, per SCC of the composite graph.
  std::vector<std::vector<int32_t>> plain(n);
  for (const GpEdge& e : gp) plain[e.u].push_back(e.vp);
  std::vector<int32_t> comp = scc_comp(n, plain);
  int32_t max_comp = -1;
  for (int32_t v = 0; v < n; ++v) max_comp = std::max(max_comp, comp[v]);
  std::vector<std::vector<int32_t>> members(max_comp + 1);
  for (int32_t v = 0; v < n; ++v) members[comp[v]].push_back(v);
  std::vector<std::vector<GpEdge>> internal(max_comp + 1);
  for (const GpEdge& e : gp)
    if (comp[e.u] == comp[e.vp]) internal[comp[e.u]].push_back(e);

  std::optional<Rational> best;
  int32_t best_cid = -1;
  const int64_t inf = INT64_MAX / 4;
  for (int32_t cid = 0; cid <= max_comp; ++cid) {
    const auto& vs = members[cid];
    const auto& es = internal[cid];
    if (es.empty()) continue;
    const int32_t m = static_cast<int32_t>(vs.size());
    std::vector<int32_t> pos(n, -1);
    for (int32_t i = 0; i < m; ++i) pos[vs[i]] = i;
    // D[k][x]: min weight of a k-edge walk from vs[0] to x.
    std::vector<int64_t> D(static_cast<size_t>(m + 1) * m, inf);
    D[pos[vs[0]]] = 0;
    for (int32_t k = 1; k <= m; ++k) {
      const int64_t* prev = &D[static_cast<size_t>(k - 1) * m];
      int64_t* cur = &D[static_cast<size_t>(k) * m];
      for (const GpEdge& e : es) {
        int64_t du = prev[pos[e.u]];
        if (du >= inf) continue;
        int64_t cand = du + e.w;
        if (cand < cur[pos[e.vp]]) cur[pos[e.vp]] = cand;
      }
    }
    for (int32_t i = 0; i < m; ++i) {
      int64_t dn = D[static_cast<size_t>(m) * m + i];
      if (dn >= inf) continue;
      std::optional<Rational> worst;
      for (int32_t k = 0; k < m; ++k) {
        int64_t dk = D[static_cast<size_t>(k) * m + i];
        if (dk >= inf) continue;
        Rational val(dn - dk, m - k);
        if (!worst || val > *worst) worst = val;
      }
      if (worst && (!best || *worst < *best)) {
        best = worst;
        best_cid = cid;
      }
    }
  }

  if (!best) {
    res.status = AsymStatus::kNoCycle;
    return res;
  }
  res.mean = *best;
  res.status = res.mean.num == 0 ? AsymStatus::kZeroThroughput : AsymStatus::kOk;
  if (res.status == AsymStatus::kOk) res.performance = res.mean.inverse();

  // Witness: a cycle whose mean equals the minimum. Scale weights so that
  // such cycles are exactly the zero-weight ones (w' = w*den - num), make
  // costs nonnegative with shortest-path potentials, and take a shortest
  // cycle over the zero-reduced-cost edges.
  {
    const auto& vs = members[best_cid];
    const auto& es = internal[best_cid];
    const int32_t m = static_cast<int32_t>(vs.size());
    std::vector<int32_t> pos(n, -1);
    for (int32_t i = 0; i < m; ++i) pos[vs[i]] = i;
    auto wprime = [&](const GpEdge& e) {
      return static_cast<int64_t>(e.w) * res.mean.den - res.mean.num;
    };
    std::vector<int64_t> phi(m, 0);
    for (int32_t round = 0; round <= m; ++round) {
      bool changed = false;
      for (const GpEdge& e : es) {
        int64_t cand = phi[pos[e.u]] + wprime(e);
        if (cand < phi[pos[e.vp]]) {
          phi[pos[e.vp]] = cand;
          changed = true;
        }
      }
      if (!changed) break;
      if (round == m) throw InternalError("cycle below the computed minimum mean");
    }
    std::vector<std::vector<int32_t>> zadj(m);  // indices into es
    for (size_t i = 0; i < es.size(); ++i) {
      const GpEdge& e = es[i];
      if (wprime(e) + phi[pos[e.u]] - phi[pos[e.vp]] == 0)
        zadj[pos[e.u]].push_back(static_cast<int32_t>(i));
    }
    // Shortest zero-cost cycle: BFS from each candidate start.
    std::vector<int32_t> best_cycle;  // es indices, in order
    for (int32_t s = 0; s < m; ++s) {
      std::vector<int32_t> par(m, -1), dist(m, -1);
      dist[s] = 0;
      std::deque<int32_t> q{s};
      while (!q.empty()) {
        int32_t x = q.front();
        q.pop_front();
        for (int32_t ei : zadj[x]) {
          int32_t y = pos[es[ei].vp];
          if (dist[y] >= 0 && y != s) continue;
          if (y == s) {
            int32_t len = dist[x] + 1;
            if (!best_cycle.empty() &&
                len >= static_cast<int32_t>(best_cycle.size()))
              continue;
            std::vector<int32_t> cyc{ei};
            for (int32_t z = x; z != s; z = pos[es[par[z]].u]) cyc.push_back(par[z]);
            std::reverse(cyc.begin(), cyc.end());
            best_cycle = std::move(cyc);
            continue;
          }
          dist[y] = dist[x] + 1;
          par[y] = ei;
          q.push_back(y);
        }
      }
    }
    if (best_cycle.empty()) throw InternalError("no cycle at the minimum mean");
    Path witness;
    int64_t ins = 0, steps = 0;
    for (int32_t ei : best_cycle) {
      expand_gp_edge(g, orig, es[ei], witness);
      ins += es[ei].w;
      ++steps;
    }
    if (Rational(ins, steps) != res.mean)
      throw InternalError("bad-cycle statistics disagree with the mean");
    std::string why;
    if (!replay_path(rr, witness, &why))
      throw InternalError("bad-cycle witness does not replay: " + why);
    res.witness = std::move(witness);
  }
  return res;
}

// ---------------------------------------------------------------------------
// response_performance

namespace {

struct IntraEdge {
  int32_t u, v;
  int32_t w;
  Step step;
};

struct LayerRun {
  std::vector<IntraEdge> edges;  // restricted to the forward closure
  std::vector<int32_t> comp;
  std::vector<char> reach;
  std::unordered_map<int32_t, int64_t> comp_val;
  std::unordered_map<int32_t, int32_t> comp_pred;  // comp -> edge idx into edges
  std::unordered_map<int32_t, int32_t> comp_seed;  // comp -> seeding entry node
};

// Longest-path propagation inside one (i, o) layer: zero-weight action edges
// (neither in nor out) plus usable time edges (weight 1), condensed by SCC.
// A positive-weight edge inside an SCC would mean unboundedly many time
// steps without progress, which the catastrophic check has excluded.
LayerRun layer_propagate(const Rts& rr,
                         const std::unordered_map<int32_t, int64_t>& entry,
                         bool after_last_in) {
  const ActionId ain = actions().in, aout = actions().out;
  const int32_t n = static_cast<int32_t>(rr.nodes.size());
  LayerRun run;
  std::vector<IntraEdge> all;
  for (int32_t v = 0; v < n; ++v) {
    for (const auto& [a, to] : rr.nodes[v].acts) {
      if (a == ain || a == aout) continue;
      Step s;
      s.act = a;
      s.from = v;
      s.to = to;
      all.push_back({v, to, 0, s});
    }
    if (rr.nodes[v].time) {
      const TimeEdge& te = *rr.nodes[v].time;
      bool usable = after_last_in ? !aset_has(te.forbid, aout) : te.full();
      if (usable) {
        Step s;
        s.is_time = true;
        s.forbid = te.forbid;
        s.from = v;
        s.to = te.to;
        all.push_back({v, te.to, 1, s});
      }
    }
  }
  std::vector<std::vector<int32_t>> adj(n);
  for (size_t i = 0; i < all.size(); ++i) adj[all[i].u].push_back(static_cast<int32_t>(i));
  run.reach.assign(n, 0);
  std::vector<int32_t> stk;
  for (const auto& [v, b] : entry)
    if (!run.reach[v]) {
      run.reach[v] = 1;
      stk.push_back(v);
    }
  while (!stk.empty()) {
    int32_t v = stk.back();
    stk.pop_back();
    for (int32_t ei : adj[v]) {
      int32_t to = all[ei].v;
      if (!run.reach[to]) {
        run.reach[to] = 1;
        stk.push_back(to);
      }
    }
  }
  for (const IntraEdge& e : all)
    if (run.reach[e.u]) run.edges.push_back(e);

  std::vector<std::vector<int32_t>> plain(n);
  for (const IntraEdge& e : run.edges) plain[e.u].push_back(e.v);
  run.comp = scc_comp(n, plain);
  for (const IntraEdge& e : run.edges)
    if (e.w > 0 && run.comp[e.u] == run.comp[e.v])
      throw PreconditionViolated(
          "time-positive cycle inside a request layer (input not catastrophic-free?)");

  int32_t max_comp = -1;
  for (int32_t v = 0; v < n; ++v)
    if (run.reach[v]) max_comp = std::max(max_comp, run.comp[v]);
  std::vector<std::vector<int32_t>> cadj(max_comp + 1);
  for (size_t i = 0; i < run.edges.size(); ++i) {
    const IntraEdge& e = run.edges[i];
    if (run.comp[e.u] != run.comp[e.v]) cadj[run.comp[e.u]].push_back(static_cast<int32_t>(i));
  }
  // Seed component values with entry balances (largest entry wins; ties to
  // the smallest node id for determinism).
  std::vector<std::pair<int32_t, int64_t>> sorted_entry(entry.begin(), entry.end());
  std::sort(sorted_entry.begin(), sorted_entry.end());
  for (const auto& [v, b] : sorted_entry) {
    int32_t c = run.comp[v];
    auto it = run.comp_val.find(c);
    if (it == run.comp_val.end() || b > it->second) {
      run.comp_val[c] = b;
      run.comp_seed[c] = v;
    }
  }
  // Tarjan ids are reverse-topological: edges go from higher to lower ids,
  // so one descending sweep settles every component.
  for (int32_t c = max_comp; c >= 0; --c) {
    auto it = run.comp_val.find(c);
    if (it == run.comp_val.end()) continue;
    int64_t base = it->second;
    for (int32_t ei : cadj[c]) {
      const IntraEdge& e = run.edges[ei];
      int32_t c2 = run.comp[e.v];
      int64_t cand = base + e.w;
      auto jt = run.comp_val.find(c2);
      if (jt == run.comp_val.end() || cand > jt->second) {
        run.comp_val[c2] = cand;
        run.comp_pred[c2] = ei;
        run.comp_seed.erase(c2);
      }
    }
  }
  return run;
}

// Zero-weight path inside one component of a layer.
Path zero_path(const LayerRun& run, int32_t from, int32_t to) {
  if (from == to) return {};
  int32_t cid = run.comp[from];
  std::unordered_map<int32_t, int32_t> par;  // node -> edge idx
  std::deque<int32_t> q{from};
  std::unordered_set<int32_t> seen{from};
  while (!q.empty() && !seen.count(to)) {
    int32_t x = q.front();
    q.pop_front();
    for (size_t i = 0; i < run.edges.size(); ++i) {
      const IntraEdge& e = run.edges[i];
      if (e.u != x || e.w != 0 || run.comp[e.v] != cid) continue;
      if (seen.count(e.v)) continue;
      seen.insert(e.v);
      par[e.v] = static_cast<int32_t>(i);
      q.push_back(e.v);
    }
  }
  if (!seen.count(to)) throw InternalError("layer component lost its connecting path");
  Path p;
  for (int32_t x = to; x != from; x = run.edges[par[x]].u) p.push_back(run.edges[par[x]].step);
  std::reverse(p.begin(), p.end());
  return p;
}

// Entry node and concrete steps realizing value `val` at `target` inside a
// propagated layer.
std::pair<int32_t, Path> realize_layer(const LayerRun& run, int32_t target, int64_t val) {
  if (run.comp_val.at(run.comp[target]) != val)
    throw InternalError("layer value does not match its propagation");
  std::vector<int32_t> chain;  // edge indices, target-side first
  int32_t c = run.comp[target];
  while (true) {
    auto it = run.comp_pred.find(c);
    if (it == run.comp_pred.end()) break;
    chain.push_back(it->second);
    c = run.comp[run.edges[it->second].u];
  }
  auto seed = run.comp_seed.find(c);
  if (seed == run.comp_seed.end()) throw InternalError("layer chain has no entry seed");
  int32_t at = seed->second;
  Path steps;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const IntraEdge& e = run.edges[*it];
    Path hop = zero_path(run, at, e.u);
    steps.insert(steps.end(), hop.begin(), hop.end());
    steps.push_back(e.step);
    at = e.v;
  }
  Path tail = zero_path(run, at, target);
  steps.insert(steps.end(), tail.begin(), tail.end());
  return {seed->second, std::move(steps)};
}

}  // namespace

RpResult response_performance(const Rts& rr, int64_t n) {
  if (n < 1) throw InternalError("response performance needs n >= 1");
  const ActionId ain = actions().in, aout = actions().out;

  struct Layer {
    std::unordered_map<int32_t, int64_t> entry;
    // node -> (prev node, action, prev i, prev o)
    std::unordered_map<int32_t, std::tuple<int32_t, ActionId, int32_t, int32_t>> entry_pred;
    std::unordered_map<int32_t, int64_t> final_val;
  };
  auto valid = [&](int64_t i, int64_t o) {
    return i >= 0 && i <= n && o >= 0 && o <= std::min(i, n - 1);
  };
  std::vector<std::vector<Layer>> layers(n + 1, std::vector<Layer>(n));
  layers[0][0].entry[rr.root] = 0;

  int64_t best_val = 0;
  int32_t best_node = rr.root;
  int32_t best_i = 0, best_o = 0;

  for (int64_t s = 0; s <= 2 * n; ++s) {
    for (int64_t i = 0; i <= n; ++i) {
      int64_t o = s - i;
      if (!valid(i, o)) continue;
      Layer& L = layers[i][o];
      if (L.entry.empty()) continue;
      LayerRun run = layer_propagate(rr, L.entry, i == n);
      const int32_t N = static_cast<int32_t>(rr.nodes.size());
      for (int32_t v = 0; v < N; ++v) {
        if (!run.reach[v]) continue;
        auto it = run.comp_val.find(run.comp[v]);
        if (it == run.comp_val.end()) continue;
        L.final_val[v] = it->second;
        if (it->second > best_val) {
          best_val = it->second;
          best_node = v;
          best_i = static_cast<int32_t>(i);
          best_o = static_cast<int32_t>(o);
        }
      }
      // in/out edges leave the layer, carrying the value unchanged.
      for (int32_t v = 0; v < N; ++v) {
        auto fv = L.final_val.find(v);
        if (fv == L.final_val.end()) continue;
        for (const auto& [a, to] : rr.nodes[v].acts) {
          int64_t ni = i, no = o;
          if (a == ain) ni = i + 1;
          else if (a == aout) no = o + 1;
          else continue;
          if (!valid(ni, no)) continue;
          Layer& T = layers[ni][no];
          auto et = T.entry.find(to);
          if (et == T.entry.end() || fv->second > et->second) {
            T.entry[to] = fv->second;
            T.entry_pred[to] = {v, a, static_cast<int32_t>(i), static_cast<int32_t>(o)};
          }
        }
      }
    }
  }

  // Witness: walk the optimum backwards through the layers, re-running each
  // layer's propagation to realize the intra-layer segments.
  RpResult res;
  res.value = best_val;
  std::vector<Path> segments;
  int32_t v = best_node, i = best_i, o = best_o;
  int64_t val = best_val;
  while (true) {
    Layer& L = layers[i][o];
    LayerRun run = layer_propagate(rr, L.entry, i == static_cast<int32_t>(n));
    auto [e, steps] = realize_layer(run, v, val);
    segments.push_back(std::move(steps));
    if (i == 0 && o == 0 && e == rr.root) break;
    auto pit = L.entry_pred.find(e);
    if (pit == L.entry_pred.end()) throw InternalError("layer entry without a crossing edge");
    auto [f, a, pi, po] = pit->second;
    Step cross;
    cross.act = a;
    cross.from = f;
    cross.to = e;
    segments.push_back({cross});
    val = L.entry.at(e);
    v = f;
    i = pi;
    o = po;
  }
  for (auto it = segments.rbegin(); it != segments.rend(); ++it)
    res.witness.insert(res.witness.end(), it->begin(), it->end());

  int64_t times = 0, ins = 0, outs = 0;
  for (const Step& s : res.witness) {
    if (s.is_time) ++times;
    else if (s.act == ain) ++ins;
    else if (s.act == aout) ++outs;
  }
  std::string why;
  if (!replay_path(rr, res.witness, &why))
    throw InternalError("critical-path witness does not replay: " + why);
  if (times != res.value || ins > n || outs > n - 1)
    throw InternalError("critical-path witness statistics disagree");
  return res;
}

// ---------------------------------------------------------------------------
// oracle_rp

int64_t oracle_rp(TermTable& tt, Semantics& sem, TermId p, int64_t n, size_t cap) {
  const ActionId aomega = actions().omega;
  BuildOpts raw;
  raw.cap = cap;
  raw.fold_inert_urgency = false;
  Rts rp = sem.build_rts(p, raw);
  Rts ru = sem.build_rts(gen_user(tt, static_cast<int>(n)), raw);
  SyncSet all_but;
  all_but.all_but_omega = true;
  Rts g = compose_parallel(tt, rp, ru, tt.intern_sync(all_but), cap);

  const int32_t N = static_cast<int32_t>(g.nodes.size());
  struct E {
    int32_t to;
    int32_t w;
  };
  std::vector<std::vector<E>> adj(N);
  for (int32_t v = 0; v < N; ++v) {
    for (const auto& [a, to] : g.nodes[v].acts)
      if (a != aomega) adj[v].push_back({to, 0});
    if (g.nodes[v].time && g.nodes[v].time->full())
      adj[v].push_back({g.nodes[v].time->to, 1});
  }
  // Only states reachable without performing omega matter.
  std::vector<char> seen(N, 0);
  std::vector<int32_t> stk{g.root};
  seen[g.root] = 1;
  while (!stk.empty()) {
    int32_t v = stk.back();
    stk.pop_back();
    for (const E& e : adj[v])
      if (!seen[e.to]) {
        seen[e.to] = 1;
        stk.push_back(e.to);
      }
  }
  std::vector<std::vector<int32_t>> plain(N);
  for (int32_t v = 0; v < N; ++v)
    if (seen[v])
      for (const E& e : adj[v]) plain[v].push_back(e.to);
  std::vector<int32_t> comp = scc_comp(N, plain);
  for (int32_t v = 0; v < N; ++v) {
    if (!seen[v]) continue;
    for (const E& e : adj[v])
      if (e.w > 0 && comp[v] == comp[e.to])
        throw InternalError("oracle found unbounded time steps before omega");
  }
  int32_t max_comp = -1;
  for (int32_t v = 0; v < N; ++v) max_comp = std::max(max_comp, comp[v]);
  std::vector<std::vector<std::pair<int32_t, int32_t>>> cadj(max_comp + 1);
  for (int32_t v = 0; v < N; ++v)
    if (seen[v])
      for (const E& e : adj[v]) cadj[comp[v]].emplace_back(comp[e.to], e.w);
  const int64_t none = INT64_MIN;
  std::vector<int64_t> cd(max_comp + 1, none);
  cd[comp[g.root]] = 0;
  int64_t best = 0;
  for (int32_t c = max_comp; c >= 0; --c) {
    if (cd[c] == none) continue;
    best = std::max(best, cd[c]);
    for (const auto& [c2, w] : cadj[c]) {
      if (c2 == c) continue;
      cd[c2] = std::max(cd[c2], cd[c] + w);
    }
  }
  return best;
}

}  // namespace pafas
