#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pafas/parser.hpp"
#include "pafas/perf.hpp"
#include "pafas/rts.hpp"
#include "pafas/semantics.hpp"
#include "pafas/term.hpp"

namespace pafas::testutil {

inline TermId parse1(TermTable& tt, const std::string& src) {
  return parse_term(tt, src);
}

inline ProgramEnv parse_prog(TermTable& tt, const std::string& src) {
  return parse_program(tt, src, "<test>");
}

inline size_t count_acts(const Path& p, ActionId a) {
  size_t n = 0;
  for (const Step& s : p)
    if (!s.is_time && s.act == a) ++n;
  return n;
}

inline size_t count_time(const Path& p) {
  size_t n = 0;
  for (const Step& s : p)
    if (s.is_time) ++n;
  return n;
}

inline size_t count_full_time(const Path& p) {
  size_t n = 0;
  for (const Step& s : p)
    if (s.is_time && s.forbid.empty()) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Synthetic graphs for the analysis tests: ids are assigned densely, the
// first added node is the root.

struct GraphBuilder {
  Rts g;

  int32_t node(const std::string& label) {
    RtsNode n;
    n.label = label;
    g.nodes.push_back(std::move(n));
    return static_cast<int32_t>(g.nodes.size() - 1);
  }
  void act(int32_t from, ActionId a, int32_t to) {
    auto& acts = g.nodes[static_cast<size_t>(from)].acts;
    acts.emplace_back(a, to);
    std::sort(acts.begin(), acts.end());
  }
  void time(int32_t from, int32_t to, ActionSet forbid = {}) {
    g.nodes[static_cast<size_t>(from)].time = TimeEdge{std::move(forbid), to};
  }
};

// ---------------------------------------------------------------------------
// Strong bisimilarity over action labels and exact time-step forbidden sets,
// by partition refinement on the disjoint union. Quadratic, meant for the
// small graphs of the test corpus.

inline bool bisim_equal(const Rts& a, const Rts& b) {
  size_t na = a.nodes.size();
  size_t n = na + b.nodes.size();
  auto node = [&](size_t i) -> const RtsNode& {
    return i < na ? a.nodes[i] : b.nodes[i - na];
  };
  std::vector<int> cls(n, 0);
  int classes = 1;
  for (;;) {
    std::map<std::string, int> ids;
    std::vector<int> next(n);
    for (size_t i = 0; i < n; ++i) {
      const RtsNode& nd = node(i);
      size_t base = i < na ? 0 : na;
      std::vector<std::pair<ActionId, int>> sig;
      for (auto [act, to] : nd.acts)
        sig.emplace_back(act, cls[base + static_cast<size_t>(to)]);
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      std::string key = std::to_string(cls[i]) + ";";
      for (auto [act, c] : sig)
        key += std::to_string(act) + ":" + std::to_string(c) + ",";
      key += ";";
      if (nd.time) {
        for (ActionId x : nd.time->forbid) key += std::to_string(x) + ",";
        key += "->" + std::to_string(cls[base + static_cast<size_t>(nd.time->to)]);
      }
      auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
      (void)fresh;
      next[i] = it->second;
    }
    int new_classes = static_cast<int>(ids.size());
    bool stable = new_classes == classes;
    cls.swap(next);
    classes = new_classes;
    if (stable) break;
  }
  return cls[static_cast<size_t>(a.root)] == cls[na + static_cast<size_t>(b.root)];
}

// ---------------------------------------------------------------------------
// Random closed, guarded terms. Guardedness is enforced during generation:
// a bound variable may only be emitted once at least one prefix separates it
// from its binder.

struct TermGen {
  TermTable& tt;
  std::mt19937 rng;
  std::vector<ActionId> alphabet;

  TermGen(TermTable& tt_, uint32_t seed) : tt(tt_), rng(seed) {
    alphabet = {actions().intern("a"), actions().intern("b"),
                actions().intern("c")};
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool chance(int percent) { return pick(100) < percent; }

  ActionId visible() { return alphabet[static_cast<size_t>(pick(static_cast<int>(alphabet.size())))]; }

  SyncId sync_set() {
    SyncSet s;
    for (ActionId a : alphabet)
      if (chance(40)) aset_insert(s.acts, a);
    return tt.intern_sync(std::move(s));
  }

  RelabelId relabel_fn() {
    std::vector<std::pair<ActionId, ActionId>> entries;
    ActionId src = visible();
    ActionId dst = chance(30) ? kTau : visible();
    entries.emplace_back(src, dst);
    if (chance(30)) {
      ActionId src2 = visible();
      if (src2 != src) entries.emplace_back(src2, chance(30) ? kTau : visible());
    }
    return tt.intern_relabel(make_relabel(std::move(entries)));
  }

  // crossings[i] = prefixes passed since binder i (innermost last) opened.
  TermId gen(int depth, std::vector<int>& crossings) {
    bool var_ok = std::any_of(crossings.begin(), crossings.end(),
                              [](int c) { return c > 0; });
    if (depth <= 0) {
      if (var_ok && chance(40)) return emit_var(crossings);
      return tt.nil();
    }
    switch (pick(10)) {
      case 0:
        return tt.nil();
      case 1:
        if (var_ok) return emit_var(crossings);
        return tt.nil();
      case 2:
      case 3:
      case 4: {  // prefix
        bool urgent = chance(30);
        ActionId a = chance(20) ? kTau : visible();
        for (int& c : crossings) ++c;
        TermId body = gen(depth - 1, crossings);
        for (int& c : crossings) --c;
        return tt.prefix(urgent, a, body);
      }
      case 5:
      case 6: {
        TermId l = gen(depth - 1, crossings);
        TermId r = gen(depth - 1, crossings);
        return tt.choice(l, r);
      }
      case 7: {
        TermId l = gen(depth - 1, crossings);
        TermId r = gen(depth - 1, crossings);
        return tt.par(l, sync_set(), r);
      }
      case 8: {
        TermId body = gen(depth - 1, crossings);
        return tt.rel(body, relabel_fn());
      }
      default: {  // rec
        crossings.push_back(0);
        TermId body = gen(depth - 1, crossings);
        crossings.pop_back();
        return tt.rec(body, tt.intern_name("x"));
      }
    }
  }

  TermId emit_var(const std::vector<int>& crossings) {
    std::vector<int32_t> ok;
    for (size_t i = 0; i < crossings.size(); ++i)
      if (crossings[i] > 0)
        ok.push_back(static_cast<int32_t>(crossings.size() - 1 - i));
    return tt.var(ok[static_cast<size_t>(pick(static_cast<int>(ok.size())))]);
  }

  TermId closed(int depth) {
    std::vector<int> crossings;
    return gen(depth, crossings);
  }
};

// Random graphs over the request/response alphabet, shaped like reduced
// transition systems: sorted action lists, at most one time edge per node.
inline Rts random_service_graph(std::mt19937& rng) {
  ActionTable& at = actions();
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int n = 4 + pick(7);
  GraphBuilder b;
  for (int i = 0; i < n; ++i) b.node("s" + std::to_string(i));
  ActionId labels[3] = {at.in, at.out, kTau};
  for (int i = 0; i < n; ++i) {
    int k = pick(3);
    for (int e = 0; e < k; ++e) b.act(i, labels[pick(3)], pick(n));
    if (pick(10) < 7) {
      ActionSet forbid;
      if (pick(10) >= 6) {
        if (pick(2)) aset_insert(forbid, at.in);
        if (forbid.empty() || pick(2)) aset_insert(forbid, at.out);
      }
      b.time(i, pick(n), forbid);
    }
  }
  return b.g;
}

// ---------------------------------------------------------------------------
// CLI driver: runs a command, captures stdout(+stderr) and the exit code.

struct CmdResult {
  int exit = -1;
  std::string out;
};

inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  int status = pclose(p);
  if (WIFEXITED(status)) r.exit = WEXITSTATUS(status);
  return r;
}

}  // namespace pafas::testutil
