#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "pafas/errors.hpp"
#include "pafas/term.hpp"

using namespace pafas;
using namespace pafas::testutil;

TEST_CASE("hash consing merges structurally equal terms") {
  TermTable tt;
  ActionId a = actions().intern("a");
  TermId t1 = tt.prefix(false, a, tt.nil());
  TermId t2 = tt.prefix(false, a, tt.nil());
  CHECK(t1 == t2);
  CHECK(tt.prefix(true, a, tt.nil()) != t1);
  CHECK(tt.choice(t1, tt.nil()) == tt.choice(t1, tt.nil()));
  CHECK(tt.choice(t1, tt.nil()) != tt.choice(tt.nil(), t1));
}

TEST_CASE("alpha-equivalent binders share a term id") {
  TermTable tt;
  TermId x = parse1(tt, "rec x. a.x");
  TermId y = parse1(tt, "rec y. a.y");
  CHECK(x == y);
  CHECK(canonical_key(tt, x) == canonical_key(tt, y));
  // different binding structure stays distinct
  TermId nested = parse1(tt, "rec x. a.rec y. b.(x + y)");
  TermId other = parse1(tt, "rec x. a.rec y. b.(y + y)");
  CHECK(nested != other);
}

TEST_CASE("canonical_key separates semantically different constructs") {
  TermTable tt;
  CHECK(canonical_key(tt, parse1(tt, "a.0")) != canonical_key(tt, parse1(tt, "_a.0")));
  CHECK(canonical_key(tt, parse1(tt, "a.0 |[a]| b.0")) !=
        canonical_key(tt, parse1(tt, "a.0 |[]| b.0")));
  CHECK(canonical_key(tt, parse1(tt, "a.0 || b.0")) !=
        canonical_key(tt, parse1(tt, "a.0 |[]| b.0")));
  CHECK(canonical_key(tt, parse1(tt, "a.0[a->b]")) !=
        canonical_key(tt, parse1(tt, "a.0[a->tau]")));
  CHECK(canonical_key(tt, parse1(tt, "a.0 / {a}")) ==
        canonical_key(tt, parse1(tt, "a.0[a->tau]")));
}

TEST_CASE("render round-trips through the parser") {
  const char* cases[] = {
      "0",
      "a.0",
      "_a.0",
      "tau.b.0",
      "_tau.0",
      "a.0 + b.0 + tau.0",
      "a.b.0 + c.0",
      "(a.0 + b.0) |[a,b]| c.a.0",
      "a.0 || b.0",
      "a.0 |[]| b.0",
      "(a.0 |[a]| a.b.0) / {a,b}",
      "a.0[a->b,c->tau]",
      "rec x. a.x",
      "rec x. a.(x + b.x)",
      "rec x. a.rec y. b.(x + y)",
      "(rec x. a.x) / {a}",
      "a.rec x. b.x + c.0",
      "((a.0)[a->b])[b->c]",
  };
  TermTable tt;
  for (const char* src : cases) {
    CAPTURE(src);
    TermId t = parse1(tt, src);
    TermId back = parse1(tt, render(tt, t));
    CHECK(back == t);
    CHECK(canonical_key(tt, back) == canonical_key(tt, t));
  }
}

TEST_CASE("render renames binders that would collide") {
  TermTable tt;
  ActionId a = actions().intern("a");
  // binder hinted "a" over a body that uses action a
  TermId t = tt.rec(tt.prefix(false, a, tt.var(0)), tt.intern_name("a"));
  std::string s = render(tt, t);
  CHECK(parse1(tt, s) == t);

  // binder hinted like a definition name referenced in its own scope
  TermId body = tt.prefix(false, a, tt.choice(tt.var(0), tt.ref(tt.intern_name("P"))));
  TermId u = tt.rec(body, tt.intern_name("P"));
  std::string prog = "P = b.0;\nmain " + render(tt, u) + "\n";
  ProgramEnv env = parse_prog(tt, prog);
  CHECK(env.main == u);
}

TEST_CASE("operator precedence: prefix, then postfix, then choice, then parallel") {
  TermTable tt;
  auto key = [&](const char* s) { return canonical_key(tt, parse1(tt, s)); };
  CHECK(key("a.0[a->b]") == key("(a.0)[a->b]"));
  CHECK(key("a.0 / {a}") == key("(a.0) / {a}"));
  CHECK(key("a.b.0") == key("a.(b.0)"));
  CHECK(key("a.0 + b.0[b->c]") == key("a.0 + ((b.0)[b->c])"));
  CHECK(key("a.0 + b.0 |[a]| c.0") == key("(a.0 + b.0) |[a]| c.0"));
  CHECK(key("a.0 |[]| b.0 |[b]| c.0") == key("(a.0 |[]| b.0) |[b]| c.0"));
  CHECK(key("rec x. a.x + b.0") == key("(rec x. a.x) + b.0"));
  CHECK(key("rec x. a.x / {a}") == key("(rec x. a.x) / {a}"));
}

TEST_CASE("well-formedness rejects unguarded recursion") {
  TermTable tt;
  CHECK_THROWS_AS((void)parse1(tt, "rec x. x"), UnguardedRecursion);
  CHECK_THROWS_AS((void)parse1(tt, "rec x. x + a.0"), UnguardedRecursion);
  CHECK_THROWS_AS((void)parse1(tt, "rec x. (x |[]| a.0)"), UnguardedRecursion);
  CHECK_THROWS_AS((void)parse1(tt, "rec x. (x / {a})"), UnguardedRecursion);
  CHECK_THROWS_AS((void)parse1(tt, "rec x. rec y. (x + a.y)"), UnguardedRecursion);
  CHECK_NOTHROW((void)parse1(tt, "rec x. a.x"));
  CHECK_NOTHROW((void)parse1(tt, "rec x. tau.x"));
  CHECK_NOTHROW((void)parse1(tt, "rec x. a.(x |[]| x)"));
}

TEST_CASE("well-formedness rejects unguarded definition cycles") {
  TermTable tt;
  CHECK_THROWS_AS(parse_prog(tt, "X = Y; Y = X; main X"), UnguardedRecursion);
  CHECK_THROWS_AS(parse_prog(tt, "X = X + a.0; main X"), UnguardedRecursion);
  CHECK_THROWS_AS(parse_prog(tt, "X = (Y |[a]| a.0); Y = X; main X"),
                  UnguardedRecursion);
  // a cycle that always passes under a prefix is fine
  CHECK_NOTHROW(parse_prog(tt, "X = a.Y; Y = b.X; main X"));
  CHECK_NOTHROW(parse_prog(tt, "X = Y + a.0; Y = b.X; main X"));
}

TEST_CASE("well-formedness rejects unbound names") {
  TermTable tt;
  CHECK_THROWS_AS(parse_prog(tt, "main X"), UnboundVariable);
  CHECK_THROWS_AS((void)parse1(tt, "a.Undefined"), UnboundVariable);
  CHECK_NOTHROW(parse_prog(tt, "X = a.X; main X"));
}

TEST_CASE("relabelling construction validates its map") {
  ActionId a = actions().intern("a");
  ActionId b = actions().intern("b");
  ActionId c = actions().intern("c");
  CHECK_THROWS_AS(make_relabel({{kTau, a}}), WellFormedError);
  CHECK_THROWS_AS(make_relabel({{a, b}, {a, c}}), WellFormedError);
  CHECK(make_relabel({{a, a}}).map.empty());
  CHECK(make_relabel({{a, b}, {a, b}}).map.size() == 1);
  RelabelFn h = make_hide(aset({a, b}));
  CHECK(h.apply(a) == kTau);
  CHECK(h.apply(b) == kTau);
  CHECK(h.apply(c) == c);
  CHECK(h.apply(kTau) == kTau);
}

TEST_CASE("sync sets: explicit, empty and all-but-omega") {
  TermTable tt;
  TermId t = parse1(tt, "a.0 || b.0");
  const SyncSet& s = tt.sync(tt.at(t).aux);
  CHECK(s.all_but_omega);
  CHECK(s.contains(actions().intern("zzz")));
  CHECK(!s.contains(actions().omega));
  CHECK(!s.contains(kTau));

  TermId e = parse1(tt, "a.0 |[]| b.0");
  const SyncSet& es = tt.sync(tt.at(e).aux);
  CHECK(!es.all_but_omega);
  CHECK(es.acts.empty());
  CHECK(!es.contains(actions().intern("a")));
}

TEST_CASE("render_program round-trips definitions and main") {
  TermTable tt;
  std::string src =
      "Cell = in.Full;\n"
      "Full = out.Cell;\n"
      "main Cell |[in]| (rec x. in.x)\n";
  ProgramEnv env = parse_prog(tt, src);
  ProgramEnv back = parse_prog(tt, render_program(tt, env));
  REQUIRE(back.defs.size() == env.defs.size());
  for (size_t i = 0; i < env.defs.size(); ++i) {
    CHECK(back.defs[i].first == env.defs[i].first);
    CHECK(back.defs[i].second == env.defs[i].second);
  }
  CHECK(back.main == env.main);
}
