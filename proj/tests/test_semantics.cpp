#include "doctest.h"

#include <algorithm>

#include "helpers.hpp"
#include "pafas/casestudy.hpp"
#include "pafas/errors.hpp"
#include "pafas/semantics.hpp"

using namespace pafas;
using namespace pafas::testutil;

namespace {

Semantics make_sem(TermTable& tt) {
  static ProgramEnv empty;
  return Semantics(tt, empty);
}

}  // namespace

TEST_CASE("action successors of choice offer both branches") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  TermId t = parse1(tt, "a.0 + _b.0");
  auto succs = sem.successors(t);
  REQUIRE(succs.size() == 2);
  ActionId a = actions().intern("a"), b = actions().intern("b");
  CHECK(std::count(succs.begin(), succs.end(),
                   std::pair<ActionId, TermId>{a, tt.nil()}) == 1);
  CHECK(std::count(succs.begin(), succs.end(),
                   std::pair<ActionId, TermId>{b, tt.nil()}) == 1);
  CHECK(sem.successors(tt.nil()).empty());
}

TEST_CASE("parallel actions: interleaving outside, synchronization inside") {
  TermTable tt;
  Semantics sem = make_sem(tt);

  // a lazy and an urgent prefix still synchronize
  TermId s = parse1(tt, "_a.0 |[a]| a.0");
  auto ss = sem.successors(s);
  REQUIRE(ss.size() == 1);
  CHECK(ss[0].first == actions().intern("a"));
  CHECK(ss[0].second == parse1(tt, "0 |[a]| 0"));

  // without a partner a synchronized action is stuck
  CHECK(sem.successors(parse1(tt, "a.0 |[a]| b.0")).size() == 1);

  TermId i = parse1(tt, "a.0 |[]| a.0");
  CHECK(sem.successors(i).size() == 2);

  // tau never synchronizes
  TermId taus = parse1(tt, "tau.0 || tau.0");
  auto ts = sem.successors(taus);
  CHECK(ts.size() == 2);
}

TEST_CASE("relabelling maps action labels, including into tau") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  auto ss = sem.successors(parse1(tt, "a.b.0[a->b]"));
  REQUIRE(ss.size() == 1);
  CHECK(ss[0].first == actions().intern("b"));
  auto hidden = sem.successors(parse1(tt, "a.0 / {a}"));
  REQUIRE(hidden.size() == 1);
  CHECK(hidden[0].first == kTau);
}

TEST_CASE("time step of a choice needs both sides and unions the forbidden sets") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  auto ts = sem.time_step(parse1(tt, "a.0 + _b.0"));
  REQUIRE(ts.has_value());
  CHECK(ts->forbid == aset({actions().intern("b")}));
  CHECK(ts->to == parse1(tt, "_a.0 + _b.0"));

  CHECK(!sem.time_step(parse1(tt, "a.0 + _tau.0")).has_value());
  CHECK(!sem.time_step(parse1(tt, "_tau.0")).has_value());
}

TEST_CASE("lazy prefixes are patient, urgent visible prefixes block only themselves") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  auto lazy = sem.time_step(parse1(tt, "a.0"));
  REQUIRE(lazy.has_value());
  CHECK(lazy->forbid.empty());
  CHECK(lazy->to == parse1(tt, "_a.0"));

  auto urgent = sem.time_step(parse1(tt, "_a.0"));
  REQUIRE(urgent.has_value());
  CHECK(urgent->forbid == aset({actions().intern("a")}));
  CHECK(urgent->to == parse1(tt, "_a.0"));

  auto nil = sem.time_step(tt.nil());
  REQUIRE(nil.has_value());
  CHECK(nil->forbid.empty());
  CHECK(nil->to == tt.nil());
}

TEST_CASE("parallel time step: urgency is dropped for sync actions without an urgent partner") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  ActionId a = actions().intern("a"), b = actions().intern("b");

  auto free_side = sem.time_step(parse1(tt, "_a.0 |[]| _b.0"));
  REQUIRE(free_side.has_value());
  CHECK(free_side->forbid == aset({a, b}));

  // a is synchronized and only the left side insists on it
  auto one_sided = sem.time_step(parse1(tt, "_a.0 |[a]| _b.0"));
  REQUIRE(one_sided.has_value());
  CHECK(one_sided->forbid == aset({b}));

  auto both = sem.time_step(parse1(tt, "_a.0 |[a]| (_a.0 + _b.0)"));
  REQUIRE(both.has_value());
  CHECK(both->forbid == aset({a, b}));
}

TEST_CASE("hiding an urgent action stops time") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  CHECK(!sem.time_step(parse1(tt, "_a.0 / {a}")).has_value());
  // relabelling to a visible action keeps the step, with the image forbidden
  auto ts = sem.time_step(parse1(tt, "_a.0[a->b]"));
  REQUIRE(ts.has_value());
  CHECK(ts->forbid == aset({actions().intern("b")}));
}

TEST_CASE("recursion unfolds through time steps and stops when hidden") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  TermId t = parse1(tt, "(rec x. a.x) / {a}");
  auto ts = sem.time_step(t);
  REQUIRE(ts.has_value());
  CHECK(ts->forbid.empty());
  CHECK(ts->to == parse1(tt, "(_a.(rec x. a.x)) / {a}"));
  CHECK(!sem.time_step(ts->to).has_value());
}

TEST_CASE("urgentification is idempotent") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  const char* cases[] = {"a.0", "a.0 + b.c.0", "a.0 |[a]| (a.0 + b.0)",
                         "rec x. a.(b.x + tau.x)", "(a.b.0 |[b]| b.0)[a->c]"};
  for (const char* src : cases) {
    CAPTURE(src);
    TermId t = parse1(tt, src);
    auto ts = sem.time_step(t);
    REQUIRE(ts.has_value());
    auto ts2 = sem.time_step(ts->to);
    REQUIRE(ts2.has_value());
    CHECK(ts2->to == ts->to);
  }
}

TEST_CASE("unfold_active exposes the active structure only") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  CHECK(sem.unfold_active(parse1(tt, "rec x. a.x")) == parse1(tt, "a.rec x. a.x"));
  // prefix bodies stay folded
  TermId p = parse1(tt, "a.rec x. b.x");
  CHECK(sem.unfold_active(p) == p);
  CHECK(sem.unfold_active(parse1(tt, "(rec x. a.x) |[]| 0")) ==
        parse1(tt, "(a.rec x. a.x) |[]| 0"));
}

TEST_CASE("syntax_lazy scans terms and definitions") {
  TermTable tt;
  ProgramEnv env = parse_prog(tt, "X = _a.X; Y = a.Y; main Y |[]| X");
  Semantics sem(tt, env);
  CHECK(sem.syntax_lazy(env.by_name.at(tt.intern_name("Y"))));
  CHECK(!sem.syntax_lazy(env.main));
  CHECK(!sem.syntax_lazy(parse1(tt, "a.0 + _b.0")));
  CHECK(sem.syntax_lazy(parse1(tt, "rec x. a.(x |[b]| tau.0)")));
}

TEST_CASE("build_rts of Nil is one node with a full self time step") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  Rts g = sem.build_rts(tt.nil());
  REQUIRE(g.nodes.size() == 1);
  CHECK(g.action_edge_count() == 0);
  REQUIRE(g.nodes[0].time.has_value());
  CHECK(g.nodes[0].time->forbid.empty());
  CHECK(g.nodes[0].time->to == 0);
}

TEST_CASE("every node has at most one time edge and builds are deterministic") {
  TermTable tt;
  ProgramEnv env = *builtin_program(tt, "fifo:1");
  Semantics sem(tt, env);
  Rts g1 = sem.build_rts(env.main);
  for (const RtsNode& n : g1.nodes) {
    (void)n;  // the std::optional type enforces the bound; exercise access
    if (n.time) CHECK(n.time->to >= 0);
  }
  Semantics sem2(tt, env);
  Rts g2 = sem2.build_rts(env.main);
  CHECK(same_by_labels(g1, g2));
}

TEST_CASE("state cap aborts unbounded unfoldings") {
  TermTable tt;
  Semantics sem = make_sem(tt);
  TermId t = parse1(tt, "rec x. a.(x |[]| b.0)");
  BuildOpts opts;
  opts.cap = 50;
  CHECK_THROWS_AS((void)sem.build_rts(t, opts), StateCapExceeded);
}

TEST_CASE("urgency folding preserves behaviour on lazy programs") {
  for (const char* spec : {"fifo:1", "fifo:2", "pipe:1", "buff:1"}) {
    CAPTURE(spec);
    TermTable tt;
    ProgramEnv env = *builtin_program(tt, spec);
    Semantics raw_sem(tt, env);
    Rts raw = raw_sem.build_rts(env.main);
    Semantics fold_sem(tt, env);
    BuildOpts opts;
    opts.fold_inert_urgency = true;
    Rts folded = fold_sem.build_rts(env.main, opts);
    CHECK(folded.nodes.size() <= raw.nodes.size());
    CHECK(bisim_equal(raw, folded));
  }
}

TEST_CASE("compose_parallel matches the direct build of the parallel term") {
  TermTable tt;
  ProgramEnv env = *builtin_program(tt, "fifo:1");
  Semantics sem(tt, env);
  TermId user = gen_user(tt, 1);
  SyncId sync = tt.intern_sync(SyncSet{true, {}});

  Rts rp = sem.build_rts(env.main);
  Rts ru = sem.build_rts(user);
  Rts composed = compose_parallel(tt, rp, ru, sync);
  Rts direct = sem.build_rts(tt.par(env.main, sync, user));
  std::string why;
  CHECK_MESSAGE(same_by_labels(composed, direct, &why), why);
}

TEST_CASE("composing with Nil over an empty sync set changes nothing") {
  TermTable tt;
  ProgramEnv env = *builtin_program(tt, "fifo:1");
  Semantics sem(tt, env);
  Rts rp = sem.build_rts(env.main);
  Rts rnil = sem.build_rts(tt.nil());
  SyncId empty = tt.intern_sync(SyncSet{});
  Rts composed = compose_parallel(tt, rp, rnil, empty);
  CHECK(bisim_equal(composed, rp));
}
