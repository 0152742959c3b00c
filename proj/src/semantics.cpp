#include "pafas/semantics.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "pafas/errors.hpp"

namespace pafas {

namespace {

[[noreturn]] void open_term() {
  throw InternalError("SOS engine reached a free variable (term not closed)");
}

}  // namespace

TermId Semantics::resolve(TermId t) {
  const Term& n = tt_.at(t);
  if (n.kind == Kind::Ref) {
    auto def = env_.lookup(n.aux);
    if (!def) throw UnboundVariable(tt_.name(n.aux));
    return *def;
  }
  if (n.kind == Kind::Rec) {
    std::unordered_map<uint64_t, TermId> memo;
    return subst(n.a, 0, t, memo);
  }
  throw InternalError("resolve: not a Ref/Rec");
}

// body[var(depth) := replacement]; replacement is closed, so no shifting.
TermId Semantics::subst(TermId t, int32_t depth, TermId replacement,
                        std::unordered_map<uint64_t, TermId>& memo) {
  uint64_t key = (static_cast<uint64_t>(static_cast<uint32_t>(t)) << 24) |
                 static_cast<uint32_t>(depth);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  const Term& n = tt_.at(t);
  TermId out = t;
  switch (n.kind) {
    case Kind::Nil:
    case Kind::Ref:
      break;
    case Kind::Var:
      if (n.aux == depth) out = replacement;
      else if (n.aux > depth) out = tt_.var(n.aux - 1);
      break;
    case Kind::Prefix:
      out = tt_.prefix(n.urgent, n.act, subst(n.a, depth, replacement, memo));
      break;
    case Kind::Choice:
      out = tt_.choice(subst(n.a, depth, replacement, memo),
                       subst(n.b, depth, replacement, memo));
      break;
    case Kind::Par:
      out = tt_.par(subst(n.a, depth, replacement, memo), n.aux,
                    subst(n.b, depth, replacement, memo));
      break;
    case Kind::Rel:
      out = tt_.rel(subst(n.a, depth, replacement, memo), n.aux);
      break;
    case Kind::Rec:
      out = tt_.rec(subst(n.a, depth + 1, replacement, memo), n.hint);
      break;
  }
  memo.emplace(key, out);
  return out;
}

TermId Semantics::unfold_active(TermId t) {
  auto it = unfold_memo_.find(t);
  if (it != unfold_memo_.end()) return it->second;
  const Term& n = tt_.at(t);
  TermId out;
  switch (n.kind) {
    case Kind::Nil:
    case Kind::Prefix:
      out = t;
      break;
    case Kind::Choice:
      out = tt_.choice(unfold_active(n.a), unfold_active(n.b));
      break;
    case Kind::Par:
      out = tt_.par(unfold_active(n.a), n.aux, unfold_active(n.b));
      break;
    case Kind::Rel:
      out = tt_.rel(unfold_active(n.a), n.aux);
      break;
    case Kind::Ref:
    case Kind::Rec:
      out = unfold_active(resolve(t));
      break;
    case Kind::Var:
      open_term();
  }
  unfold_memo_.emplace(t, out);
  return out;
}

const std::vector<std::pair<ActionId, TermId>>& Semantics::successors(TermId t) {
  auto it = succ_memo_.find(t);
  if (it != succ_memo_.end()) return it->second;
  const Term& n = tt_.at(t);
  std::vector<std::pair<ActionId, TermId>> out;
  switch (n.kind) {
    case Kind::Nil:
      break;
    case Kind::Prefix:
      out.emplace_back(n.act, n.a);
      break;
    case Kind::Choice: {
      auto l = successors(n.a);
      auto r = successors(n.b);
      out = std::move(l);
      out.insert(out.end(), r.begin(), r.end());
      break;
    }
    case Kind::Par: {
      auto l = successors(n.a);
      auto r = successors(n.b);
      const SyncSet& sync = tt_.sync(n.aux);
      for (const auto& [a, l2] : l)
        if (a == kTau || !sync.contains(a))
          out.emplace_back(a, tt_.par(l2, n.aux, n.b));
      for (const auto& [a, r2] : r)
        if (a == kTau || !sync.contains(a))
          out.emplace_back(a, tt_.par(n.a, n.aux, r2));
      for (const auto& [a, l2] : l) {
        if (a == kTau || !sync.contains(a)) continue;
        for (const auto& [b, r2] : r)
          if (b == a) out.emplace_back(a, tt_.par(l2, n.aux, r2));
      }
      break;
    }
    case Kind::Rel: {
      auto body = successors(n.a);
      const RelabelFn& fn = tt_.relabel(n.aux);
      for (const auto& [a, b2] : body)
        out.emplace_back(fn.apply(a), tt_.rel(b2, n.aux));
      break;
    }
    case Kind::Ref:
    case Kind::Rec:
      out = successors(resolve(t));
      break;
    case Kind::Var:
      open_term();
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return succ_memo_.emplace(t, std::move(out)).first->second;
}

std::optional<TimeStep> Semantics::time_step(TermId t) {
  auto it = time_memo_.find(t);
  if (it != time_memo_.end()) return it->second;
  const Term& n = tt_.at(t);
  std::optional<TimeStep> out;
  switch (n.kind) {
    case Kind::Nil:
      out = TimeStep{{}, t};
      break;
    case Kind::Prefix:
      if (!n.urgent) {
        out = TimeStep{{}, tt_.prefix(true, n.act, n.a)};
      } else if (n.act == kTau) {
        out = std::nullopt;  // enabled urgent tau: time cannot pass
      } else {
        out = TimeStep{aset({n.act}), t};
      }
      break;
    case Kind::Choice: {
      auto l = time_step(n.a);
      auto r = time_step(n.b);
      if (l && r)
        out = TimeStep{aset_union(l->forbid, r->forbid), tt_.choice(l->to, r->to)};
      break;
    }
    case Kind::Par: {
      auto l = time_step(n.a);
      auto r = time_step(n.b);
      if (l && r) {
        const SyncSet& sync = tt_.sync(n.aux);
        ActionSet u;
        for (ActionId a : aset_inter(l->forbid, r->forbid))
          if (sync.contains(a)) aset_insert(u, a);
        for (ActionId a : aset_union(l->forbid, r->forbid))
          if (!sync.contains(a)) aset_insert(u, a);
        out = TimeStep{std::move(u), tt_.par(l->to, n.aux, r->to)};
      }
      break;
    }
    case Kind::Rel: {
      auto body = time_step(n.a);
      if (body) {
        const RelabelFn& fn = tt_.relabel(n.aux);
        ActionSet u;
        bool hides_urgent = false;
        for (ActionId a : body->forbid) {
          ActionId img = fn.apply(a);
          if (img == kTau) { hides_urgent = true; break; }
          aset_insert(u, img);
        }
        if (!hides_urgent) out = TimeStep{std::move(u), tt_.rel(body->to, n.aux)};
      }
      break;
    }
    case Kind::Ref:
    case Kind::Rec:
      out = time_step(resolve(t));
      break;
    case Kind::Var:
      open_term();
  }
  time_memo_.emplace(t, out);
  return out;
}

Semantics::UrgInfo Semantics::urg_info(TermId t) {
  auto it = urg_memo_.find(t);
  if (it != urg_memo_.end()) return it->second;
  const Term& n = tt_.at(t);
  UrgInfo out{{}, false};
  switch (n.kind) {
    case Kind::Nil:
    case Kind::Ref:
    case Kind::Rec:
      break;
    case Kind::Prefix:
      if (n.urgent) {
        if (n.act == kTau) out.blocked = true;
        else out.urgent = aset({n.act});
      }
      break;
    case Kind::Choice: {
      UrgInfo l = urg_info(n.a), r = urg_info(n.b);
      out.urgent = aset_union(l.urgent, r.urgent);
      out.blocked = l.blocked || r.blocked;
      break;
    }
    case Kind::Par: {
      UrgInfo l = urg_info(n.a), r = urg_info(n.b);
      const SyncSet& sync = tt_.sync(n.aux);
      for (ActionId a : aset_inter(l.urgent, r.urgent))
        if (sync.contains(a)) aset_insert(out.urgent, a);
      for (ActionId a : aset_union(l.urgent, r.urgent))
        if (!sync.contains(a)) aset_insert(out.urgent, a);
      out.blocked = l.blocked || r.blocked;
      break;
    }
    case Kind::Rel: {
      UrgInfo b = urg_info(n.a);
      const RelabelFn& fn = tt_.relabel(n.aux);
      out.blocked = b.blocked;
      for (ActionId a : b.urgent) {
        ActionId img = fn.apply(a);
        if (img == kTau) out.blocked = true;
        else aset_insert(out.urgent, img);
      }
      break;
    }
    case Kind::Var:
      open_term();
  }
  urg_memo_.emplace(t, out);
  return out;
}

// Context of enclosing par/rel operators for the inert-urgency test: an
// urgency mark is kept iff, walking outward, it never meets a sync set whose
// partner side lacks the (possibly relabelled) action, and any tau image
// keeps it unconditionally (a hidden urgent action stops time).
struct Semantics::CleanFrame {
  const CleanFrame* up;
  const SyncSet* sync = nullptr;  // set: par frame
  ActionSet partner_urgent;
  const RelabelFn* fn = nullptr;  // set: relabel frame

  bool keeps(ActionId a) const {
    for (const CleanFrame* f = this; f; f = f->up) {
      if (f->fn) {
        a = f->fn->apply(a);
        if (a == kTau) return true;
      } else if (f->sync->contains(a) && !aset_has(f->partner_urgent, a)) {
        return false;
      }
    }
    return true;
  }
};

TermId Semantics::clean_rec(TermId t, const CleanFrame* ctx) {
  const Term& n = tt_.at(t);
  switch (n.kind) {
    case Kind::Nil:
    case Kind::Ref:
    case Kind::Rec:
    case Kind::Var:
      return t;
    case Kind::Prefix:
      if (!n.urgent || n.act == kTau) return t;
      if (!ctx || ctx->keeps(n.act)) return t;
      return tt_.prefix(false, n.act, n.a);
    case Kind::Choice:
      return tt_.choice(clean_rec(n.a, ctx), clean_rec(n.b, ctx));
    case Kind::Par: {
      CleanFrame left{ctx, &tt_.sync(n.aux), urg_info(n.b).urgent, nullptr};
      CleanFrame right{ctx, &tt_.sync(n.aux), urg_info(n.a).urgent, nullptr};
      TermId l = clean_rec(n.a, &left);
      TermId r = clean_rec(n.b, &right);
      return tt_.par(l, n.aux, r);
    }
    case Kind::Rel: {
      CleanFrame frame{ctx, nullptr, {}, &tt_.relabel(n.aux)};
      return tt_.rel(clean_rec(n.a, &frame), n.aux);
    }
  }
  throw InternalError("clean: bad node");
}

TermId Semantics::fold_inert_urgency(TermId t) { return clean_rec(t, nullptr); }

bool Semantics::syntax_lazy(TermId t) {
  auto it = lazy_memo_.find(t);
  if (it != lazy_memo_.end()) return it->second;
  bool lazy = true;
  std::vector<TermId> stack{t};
  std::unordered_set<TermId> seen;
  while (!stack.empty() && lazy) {
    TermId x = stack.back();
    stack.pop_back();
    if (!seen.insert(x).second) continue;
    const Term& n = tt_.at(x);
    switch (n.kind) {
      case Kind::Nil:
      case Kind::Var:
        break;
      case Kind::Prefix:
        if (n.urgent) lazy = false;
        else stack.push_back(n.a);
        break;
      case Kind::Choice:
      case Kind::Par:
        stack.push_back(n.a);
        stack.push_back(n.b);
        break;
      case Kind::Rel:
      case Kind::Rec:
        stack.push_back(n.a);
        break;
      case Kind::Ref: {
        auto def = env_.lookup(n.aux);
        if (!def) throw UnboundVariable(tt_.name(n.aux));
        stack.push_back(*def);
        break;
      }
    }
  }
  lazy_memo_.emplace(t, lazy);
  return lazy;
}

Rts Semantics::build_rts(TermId root, const BuildOpts& opts) {
  const bool fold = opts.fold_inert_urgency && syntax_lazy(root);
  auto rep = [&](TermId x) {
    x = unfold_active(x);
    return fold ? fold_inert_urgency(x) : x;
  };

  Rts g;
  std::unordered_map<TermId, int32_t> ids;
  auto add = [&](TermId x) -> int32_t {
    auto it = ids.find(x);
    if (it != ids.end()) return it->second;
    int32_t id = static_cast<int32_t>(g.nodes.size());
    if (g.nodes.size() + 1 > opts.cap) throw StateCapExceeded(opts.cap);
    RtsNode node;
    node.term = x;
    node.label = render(tt_, x);
    g.nodes.push_back(std::move(node));
    ids.emplace(x, id);
    return id;
  };

  add(rep(root));
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    TermId cur = g.nodes[i].term;
    auto succs = successors(cur);  // copy: g.nodes may grow while we add
    std::vector<std::pair<ActionId, int32_t>> acts;
    for (const auto& [a, t2] : succs) acts.emplace_back(a, add(rep(t2)));
    std::sort(acts.begin(), acts.end());
    acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
    g.nodes[i].acts = std::move(acts);
    auto ts = time_step(cur);
    if (ts) g.nodes[i].time = TimeEdge{ts->forbid, add(rep(ts->to))};
  }
  return g;
}

Rts compose_parallel(TermTable& tt, const Rts& r1, const Rts& r2, SyncId sync,
                     size_t cap) {
  const SyncSet& s = tt.sync(sync);
  Rts g;
  std::unordered_map<uint64_t, int32_t> ids;
  std::vector<std::pair<int32_t, int32_t>> pairs;
  auto add = [&](int32_t i, int32_t j) -> int32_t {
    uint64_t key = (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) |
                   static_cast<uint32_t>(j);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int32_t id = static_cast<int32_t>(g.nodes.size());
    if (g.nodes.size() + 1 > cap) throw StateCapExceeded(cap);
    if (r1.nodes[i].term < 0 || r2.nodes[j].term < 0)
      throw InternalError("compose_parallel requires term-backed graphs");
    RtsNode node;
    node.term = tt.par(r1.nodes[i].term, sync, r2.nodes[j].term);
    node.label = render(tt, node.term);
    g.nodes.push_back(std::move(node));
    pairs.emplace_back(i, j);
    ids.emplace(key, id);
    return id;
  };

  add(r1.root, r2.root);
  for (size_t v = 0; v < g.nodes.size(); ++v) {
    auto [i, j] = pairs[v];
    const RtsNode& n1 = r1.nodes[i];
    const RtsNode& n2 = r2.nodes[j];
    std::vector<std::pair<ActionId, int32_t>> acts;
    for (const auto& [a, to] : n1.acts)
      if (a == kTau || !s.contains(a)) acts.emplace_back(a, add(to, j));
    for (const auto& [a, to] : n2.acts)
      if (a == kTau || !s.contains(a)) acts.emplace_back(a, add(i, to));
    for (const auto& [a, to1] : n1.acts) {
      if (a == kTau || !s.contains(a)) continue;
      for (const auto& [b, to2] : n2.acts)
        if (b == a) acts.emplace_back(a, add(to1, to2));
    }
    std::sort(acts.begin(), acts.end());
    acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
    g.nodes[v].acts = std::move(acts);
    if (n1.time && n2.time) {
      ActionSet u;
      for (ActionId a : aset_inter(n1.time->forbid, n2.time->forbid))
        if (s.contains(a)) aset_insert(u, a);
      for (ActionId a : aset_union(n1.time->forbid, n2.time->forbid))
        if (!s.contains(a)) aset_insert(u, a);
      g.nodes[v].time = TimeEdge{std::move(u), add(n1.time->to, n2.time->to)};
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Rts helpers

std::vector<bool> reachable_nodes(const Rts& g) {
  std::vector<bool> seen(g.nodes.size(), false);
  std::deque<int32_t> q{g.root};
  seen[g.root] = true;
  while (!q.empty()) {
    int32_t v = q.front();
    q.pop_front();
    auto visit = [&](int32_t w) {
      if (!seen[w]) { seen[w] = true; q.push_back(w); }
    };
    for (const auto& [a, to] : g.nodes[v].acts) visit(to);
    if (g.nodes[v].time) visit(g.nodes[v].time->to);
  }
  return seen;
}

Rts restrict_nodes(const Rts& g, const std::vector<bool>& keep,
                   std::vector<int32_t>* orig_ids) {
  std::vector<int32_t> remap(g.nodes.size(), -1);
  Rts out;
  if (orig_ids) orig_ids->clear();
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<int32_t>(out.nodes.size());
    out.nodes.push_back(g.nodes[i]);
    if (orig_ids) orig_ids->push_back(static_cast<int32_t>(i));
  }
  if (remap[g.root] < 0) throw InternalError("restrict_nodes dropped the root");
  out.root = remap[g.root];
  for (auto& node : out.nodes) {
    std::vector<std::pair<ActionId, int32_t>> acts;
    for (const auto& [a, to] : node.acts)
      if (remap[to] >= 0) acts.emplace_back(a, remap[to]);
    node.acts = std::move(acts);
    if (node.time) {
      if (remap[node.time->to] >= 0) node.time->to = remap[node.time->to];
      else node.time.reset();
    }
  }
  return out;
}

bool same_by_labels(const Rts& a, const Rts& b, std::string* why) {
  auto describe = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.nodes.size() != b.nodes.size())
    return describe("node counts differ: " + std::to_string(a.nodes.size()) +
                    " vs " + std::to_string(b.nodes.size()));
  std::unordered_map<std::string, int32_t> bidx;
  for (size_t i = 0; i < b.nodes.size(); ++i) {
    if (!bidx.emplace(b.nodes[i].label, static_cast<int32_t>(i)).second)
      return describe("duplicate label in right graph: " + b.nodes[i].label);
  }
  if (a.nodes[a.root].label != b.nodes[b.root].label)
    return describe("root labels differ");
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    auto it = bidx.find(a.nodes[i].label);
    if (it == bidx.end()) return describe("label missing: " + a.nodes[i].label);
    const RtsNode& x = a.nodes[i];
    const RtsNode& y = b.nodes[it->second];
    auto edge_set = [&](const RtsNode& n, const Rts& g) {
      std::vector<std::pair<ActionId, std::string>> es;
      for (const auto& [act, to] : n.acts) es.emplace_back(act, g.nodes[to].label);
      std::sort(es.begin(), es.end());
      return es;
    };
    if (edge_set(x, a) != edge_set(y, b))
      return describe("action edges differ at " + x.label);
    if (x.time.has_value() != y.time.has_value())
      return describe("time edge presence differs at " + x.label);
    if (x.time) {
      if (x.time->forbid != y.time->forbid)
        return describe("time edge U differs at " + x.label);
      if (a.nodes[x.time->to].label != b.nodes[y.time->to].label)
        return describe("time edge target differs at " + x.label);
    }
  }
  return true;
}

}  // namespace pafas
