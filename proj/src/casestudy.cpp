#include "pafas/casestudy.hpp"

#include "pafas/errors.hpp"

namespace pafas {

namespace {

void define(TermTable& tt, ProgramEnv& env, const std::string& name, TermId body) {
  NameId id = tt.intern_name(name);
  env.defs.emplace_back(id, body);
  env.by_name.emplace(id, body);
}

TermId lz(TermTable& tt, const std::string& act, TermId body) {
  return tt.prefix(false, actions().intern(act), body);
}

TermId refname(TermTable& tt, const std::string& name) {
  return tt.ref(tt.intern_name(name));
}

SyncId sync_of(TermTable& tt, const ActionSet& acts) {
  SyncSet s;
  s.acts = acts;
  return tt.intern_sync(std::move(s));
}

TermId hide_over(TermTable& tt, const ActionSet& acts, TermId body) {
  return tt.rel(body, tt.intern_relabel(make_hide(acts)));
}

void require_capacity(int n) {
  if (n < 1) throw WellFormedError("buffer parameter must be at least 1");
}

}  // namespace

ProgramEnv gen_fifo(TermTable& tt, int n) {
  require_capacity(n);
  ProgramEnv env;
  auto state = [&](int i) { return "fifo" + std::to_string(i); };
  for (int i = 0; i <= n + 2; ++i) {
    TermId body;
    if (i == 0) {
      body = lz(tt, "in", refname(tt, state(1)));
    } else if (i == n + 2) {
      body = lz(tt, "out", refname(tt, state(i - 1)));
    } else {
      body = tt.choice(lz(tt, "in", refname(tt, state(i + 1))),
                       lz(tt, "out", refname(tt, state(i - 1))));
    }
    define(tt, env, state(i), body);
  }
  env.main = refname(tt, state(0));
  return env;
}

ProgramEnv gen_pipe(TermTable& tt, int n) {
  require_capacity(n);
  ProgramEnv env;
  define(tt, env, "C", lz(tt, "in", refname(tt, "Cp")));
  define(tt, env, "Cp", lz(tt, "out", refname(tt, "C")));
  ActionId in = actions().in, out = actions().out;
  auto handover = [&](int i) { return actions().intern("d" + std::to_string(i)); };
  auto cell = [&](int i) {
    std::vector<std::pair<ActionId, ActionId>> map;
    if (i <= n) map.emplace_back(in, handover(i));
    if (i >= 1) map.emplace_back(out, handover(i - 1));
    return tt.rel(refname(tt, "C"), tt.intern_relabel(make_relabel(std::move(map))));
  };
  TermId t = cell(0);
  for (int i = 1; i <= n + 1; ++i)
    t = tt.par(t, sync_of(tt, aset({handover(i - 1)})), cell(i));
  ActionSet hidden;
  for (int j = 0; j <= n + 1; ++j) aset_insert(hidden, handover(j));
  env.main = hide_over(tt, hidden, t);
  return env;
}

ProgramEnv gen_buff(TermTable& tt, int n) {
  require_capacity(n);
  ProgramEnv env;
  define(tt, env, "C", lz(tt, "in", refname(tt, "Cp")));
  define(tt, env, "Cp", lz(tt, "out", refname(tt, "C")));
  ActionId in = actions().in, out = actions().out;
  auto wr = [&](int i) { return actions().intern("w" + std::to_string(i)); };
  auto rd = [&](int i) { return actions().intern("r" + std::to_string(i)); };

  TermId mem = -1;
  for (int i = 0; i < n; ++i) {
    TermId cell = tt.rel(refname(tt, "C"),
                         tt.intern_relabel(make_relabel({{in, wr(i)}, {out, rd(i)}})));
    mem = i == 0 ? cell : tt.par(mem, sync_of(tt, {}), cell);
  }

  // Controller states bc(x, y, i, m): x tells whether slot i is filled, y
  // whether an element is ready to leave, i the read position, m how many
  // elements sit in memory; e = empty, f = full.
  auto bname = [&](char x, char y, int i, int m) {
    return std::string("bc_") + x + y + "_" + std::to_string(i) + "_" +
           std::to_string(m);
  };
  auto bref = [&](char x, char y, int i, int m) {
    return refname(tt, bname(x, y, i, m));
  };
  auto rot = [&](int a, int b) { return (a + b) % n; };
  auto act = [&](ActionId a, TermId body) { return tt.prefix(false, a, body); };
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m <= n; ++m) {
      TermId ee, fe;
      if (m == 0) {
        ee = act(in, bref('f', 'e', i, m));
        fe = act(wr(i), bref('e', 'e', i, 1));
      } else {
        ee = tt.choice(act(in, bref('f', 'e', i, m)),
                       act(rd(i), bref('e', 'f', rot(i, 1), m - 1)));
        if (m < n) {
          fe = tt.choice(act(wr(rot(i, m)), bref('e', 'e', i, m + 1)),
                         act(rd(i), bref('f', 'f', rot(i, 1), m - 1)));
        } else {
          fe = act(rd(i), bref('f', 'f', rot(i, 1), n - 1));
        }
      }
      TermId ef = tt.choice(act(in, bref('f', 'f', i, m)),
                            act(out, bref('e', 'e', i, m)));
      TermId ff;
      if (m < n) {
        ff = tt.choice(act(wr(rot(i, m)), bref('e', 'f', i, m + 1)),
                       act(out, bref('f', 'e', i, m)));
      } else {
        ff = act(out, bref('f', 'e', i, m));
      }
      define(tt, env, bname('e', 'e', i, m), ee);
      define(tt, env, bname('f', 'e', i, m), fe);
      define(tt, env, bname('e', 'f', i, m), ef);
      define(tt, env, bname('f', 'f', i, m), ff);
    }
  }

  ActionSet bus;
  for (int j = 0; j < n; ++j) {
    aset_insert(bus, wr(j));
    aset_insert(bus, rd(j));
  }
  env.main = hide_over(
      tt, bus, tt.par(mem, sync_of(tt, bus), bref('e', 'e', 0, 0)));
  return env;
}

TermId gen_user(TermTable& tt, int n) {
  require_capacity(n);
  auto thread = [&] {
    return tt.prefix(true, actions().in,
                     tt.prefix(true, actions().out,
                               tt.prefix(true, actions().omega, tt.nil())));
  };
  TermId u = thread();
  SyncId omega_only = sync_of(tt, aset({actions().omega}));
  for (int i = 1; i < n; ++i) u = tt.par(u, omega_only, thread());
  return u;
}

std::optional<ProgramEnv> builtin_program(TermTable& tt, const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return std::nullopt;
  std::string kind = spec.substr(0, colon);
  std::string arg = spec.substr(colon + 1);
  if (kind != "fifo" && kind != "pipe" && kind != "buff" && kind != "user")
    return std::nullopt;
  if (arg.empty() || arg.find_first_not_of("0123456789") != std::string::npos)
    throw WellFormedError("builtin parameter must be a number: " + spec);
  int n = 0;
  try {
    n = std::stoi(arg);
  } catch (const std::exception&) {
    throw WellFormedError("builtin parameter out of range: " + spec);
  }
  if (kind == "fifo") return gen_fifo(tt, n);
  if (kind == "pipe") return gen_pipe(tt, n);
  if (kind == "buff") return gen_buff(tt, n);
  ProgramEnv env;
  env.main = gen_user(tt, n);
  return env;
}

}  // namespace pafas
