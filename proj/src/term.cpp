#include "pafas/term.hpp"

#include <algorithm>
#include <functional>

#include "pafas/errors.hpp"

namespace pafas {

namespace {

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

// Identity of a node; Rec's hint is deliberately excluded so that
// alpha-equivalent terms intern to the same id.
bool same_node(const Term& x, const Term& y) {
  if (x.kind != y.kind || x.urgent != y.urgent || x.act != y.act ||
      x.a != y.a || x.b != y.b)
    return false;
  if (x.kind == Kind::Rec) return true;
  return x.aux == y.aux;
}

uint64_t node_hash(const Term& n) {
  uint64_t h = static_cast<uint64_t>(n.kind);
  h = mix(h, n.urgent ? 1 : 0);
  h = mix(h, static_cast<uint64_t>(static_cast<uint32_t>(n.act)));
  h = mix(h, static_cast<uint64_t>(static_cast<uint32_t>(n.a)));
  h = mix(h, static_cast<uint64_t>(static_cast<uint32_t>(n.b)));
  h = mix(h, n.kind == Kind::Rec ? 0 : static_cast<uint64_t>(static_cast<uint32_t>(n.aux)));
  return h;
}

}  // namespace

TermId TermTable::make(Term node) {
  uint64_t h = node_hash(node);
  auto& bucket = index_[h];
  for (TermId id : bucket)
    if (same_node(nodes_[static_cast<size_t>(id)], node)) return id;
  TermId id = static_cast<TermId>(nodes_.size());
  nodes_.push_back(node);
  bucket.push_back(id);
  return id;
}

TermId TermTable::nil() { return make(Term{Kind::Nil}); }

TermId TermTable::prefix(bool urgent, ActionId act, TermId body) {
  Term n{Kind::Prefix};
  n.urgent = urgent;
  n.act = act;
  n.a = body;
  return make(n);
}

TermId TermTable::choice(TermId l, TermId r) {
  Term n{Kind::Choice};
  n.a = l;
  n.b = r;
  return make(n);
}

TermId TermTable::par(TermId l, SyncId sync, TermId r) {
  Term n{Kind::Par};
  n.a = l;
  n.b = r;
  n.aux = sync;
  return make(n);
}

TermId TermTable::rel(TermId body, RelabelId fn) {
  Term n{Kind::Rel};
  n.a = body;
  n.aux = fn;
  return make(n);
}

TermId TermTable::var(int32_t index) {
  Term n{Kind::Var};
  n.aux = index;
  return make(n);
}

TermId TermTable::rec(TermId body, NameId hint) {
  Term n{Kind::Rec};
  n.a = body;
  n.aux = -1;
  n.hint = hint;
  return make(n);
}

TermId TermTable::ref(NameId name) {
  Term n{Kind::Ref};
  n.aux = name;
  return make(n);
}

NameId TermTable::intern_name(std::string_view s) {
  auto it = name_index_.find(std::string(s));
  if (it != name_index_.end()) return it->second;
  NameId id = static_cast<NameId>(names_.size());
  names_.emplace_back(s);
  name_index_.emplace(names_.back(), id);
  return id;
}

bool TermTable::has_name(std::string_view s) const {
  return name_index_.count(std::string(s)) > 0;
}

SyncId TermTable::intern_sync(SyncSet s) {
  for (size_t i = 0; i < syncs_.size(); ++i)
    if (syncs_[i] == s) return static_cast<SyncId>(i);
  syncs_.push_back(std::move(s));
  return static_cast<SyncId>(syncs_.size() - 1);
}

RelabelId TermTable::intern_relabel(RelabelFn fn) {
  for (size_t i = 0; i < relabels_.size(); ++i)
    if (relabels_[i] == fn) return static_cast<RelabelId>(i);
  relabels_.push_back(std::move(fn));
  return static_cast<RelabelId>(relabels_.size() - 1);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::vector<ActionId> sorted_by_name(ActionSet s) {
  std::sort(s.begin(), s.end(), [](ActionId x, ActionId y) {
    return actions().name(x) < actions().name(y);
  });
  return s;
}

std::string sync_str(const TermTable& tt, SyncId sid) {
  const SyncSet& s = tt.sync(sid);
  if (s.all_but_omega) return "||";
  std::string r = "|[";
  auto xs = sorted_by_name(s.acts);
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) r += ",";
    r += actions().name(xs[i]);
  }
  return r + "]|";
}

std::string relabel_str(const TermTable& tt, RelabelId rid) {
  const RelabelFn& fn = tt.relabel(rid);
  bool pure_hide = !fn.map.empty();
  for (const auto& [src, dst] : fn.map)
    if (dst != kTau) pure_hide = false;
  auto entries = fn.map;
  std::sort(entries.begin(), entries.end(), [](auto& x, auto& y) {
    return actions().name(x.first) < actions().name(y.first);
  });
  if (pure_hide) {
    std::string r = "/ {";
    for (size_t i = 0; i < entries.size(); ++i) {
      if (i) r += ",";
      r += actions().name(entries[i].first);
    }
    return r + "}";
  }
  std::string r = "[";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) r += ",";
    r += actions().name(entries[i].first) + "->" +
         (entries[i].second == kTau ? "tau" : actions().name(entries[i].second));
  }
  return r + "]";
}

// Precedence levels for render: prefix/rec bind tightest, then postfix
// relabel/hide, then +, then parallel.
enum Prec { kPar = 0, kChoice = 1, kPost = 2, kPre = 3 };

struct Renderer {
  const TermTable& tt;
  std::vector<std::string> binders;  // innermost last

  std::string fresh_binder(NameId hint, TermId scope) {
    std::string base = hint >= 0 ? tt.name(hint) : "";
    auto taken = [&](const std::string& s) {
      if (s.empty() || s == "rec" || s == "main" || s == "tau") return true;
      for (const auto& b : binders)
        if (b == s) return true;
      return ref_or_action_named(scope, s);
    };
    if (!taken(base)) return base;
    for (int k = 0;; ++k) {
      std::string cand = "x" + std::to_string(k);
      if (!taken(cand)) return cand;
    }
  }

  // A binder name must not shadow a reference or clash with an action name
  // used in a prefix position somewhere in its scope.
  bool ref_or_action_named(TermId t, const std::string& s) {
    const Term& n = tt.at(t);
    switch (n.kind) {
      case Kind::Nil:
      case Kind::Var:
        return false;
      case Kind::Ref:
        return tt.name(n.aux) == s;
      case Kind::Prefix:
        if (n.act != kTau && actions().name(n.act) == s) return true;
        return ref_or_action_named(n.a, s);
      case Kind::Choice:
      case Kind::Par:
        return ref_or_action_named(n.a, s) || ref_or_action_named(n.b, s);
      case Kind::Rel:
      case Kind::Rec:
        return ref_or_action_named(n.a, s);
    }
    return false;
  }

  std::string go(TermId t, int min_prec) {
    const Term& n = tt.at(t);
    std::string body;
    int prec;
    switch (n.kind) {
      case Kind::Nil:
        return "0";
      case Kind::Var: {
        size_t i = binders.size() - 1 - static_cast<size_t>(n.aux);
        return binders.at(i);
      }
      case Kind::Ref:
        return tt.name(n.aux);
      case Kind::Prefix: {
        std::string act = n.act == kTau ? "tau" : actions().name(n.act);
        body = (n.urgent ? "_" : "") + act + "." + go(n.a, kPre);
        prec = kPre;
        break;
      }
      case Kind::Rec: {
        std::string b = fresh_binder(n.hint, n.a);
        binders.push_back(b);
        body = "rec " + b + ". (" + go(n.a, kPar) + ")";
        binders.pop_back();
        prec = kPre;
        break;
      }
      case Kind::Rel:
        body = go(n.a, kPost) + " " + relabel_str(tt, n.aux);
        prec = kPost;
        break;
      case Kind::Choice:
        body = go(n.a, kChoice) + " + " + go(n.b, kPost);
        prec = kChoice;
        break;
      case Kind::Par:
        body = go(n.a, kPar) + " " + sync_str(tt, n.aux) + " " + go(n.b, kChoice);
        prec = kPar;
        break;
      default:
        throw InternalError("render: bad node");
    }
    if (prec < min_prec) return "(" + body + ")";
    return body;
  }
};

}  // namespace

std::string render(const TermTable& tt, TermId t) {
  Renderer r{tt, {}};
  return r.go(t, kPar);
}

std::string render_program(const TermTable& tt, const ProgramEnv& env) {
  std::string out;
  for (const auto& [name, body] : env.defs)
    out += tt.name(name) + " = " + render(tt, body) + ";\n";
  out += "main " + render(tt, env.main) + "\n";
  return out;
}

std::string canonical_key(const TermTable& tt, TermId t) {
  const Term& n = tt.at(t);
  switch (n.kind) {
    case Kind::Nil:
      return "0";
    case Kind::Var:
      return "\\" + std::to_string(n.aux);
    case Kind::Ref:
      return tt.name(n.aux);
    case Kind::Prefix:
      return std::string(n.urgent ? "(_" : "(") +
             (n.act == kTau ? "tau" : actions().name(n.act)) + "." +
             canonical_key(tt, n.a) + ")";
    case Kind::Choice:
      return "(" + canonical_key(tt, n.a) + "+" + canonical_key(tt, n.b) + ")";
    case Kind::Par: {
      const SyncSet& s = tt.sync(n.aux);
      std::string mid = s.all_but_omega ? "||" : "|[";
      if (!s.all_but_omega) {
        auto xs = sorted_by_name(s.acts);
        for (size_t i = 0; i < xs.size(); ++i) {
          if (i) mid += ",";
          mid += actions().name(xs[i]);
        }
        mid += "]|";
      }
      return "(" + canonical_key(tt, n.a) + mid + canonical_key(tt, n.b) + ")";
    }
    case Kind::Rel:
      return "(" + canonical_key(tt, n.a) + relabel_str(tt, n.aux) + ")";
    case Kind::Rec:
      return "(rec." + canonical_key(tt, n.a) + ")";
  }
  throw InternalError("canonical_key: bad node");
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

void check_closed(const TermTable& tt, const ProgramEnv& env, TermId t, int depth) {
  const Term& n = tt.at(t);
  switch (n.kind) {
    case Kind::Nil:
      return;
    case Kind::Var:
      if (n.aux < 0 || n.aux >= depth)
        throw UnboundVariable("variable index " + std::to_string(n.aux));
      return;
    case Kind::Ref:
      if (!env.lookup(n.aux)) throw UnboundVariable(tt.name(n.aux));
      return;
    case Kind::Prefix:
      check_closed(tt, env, n.a, depth);
      return;
    case Kind::Choice:
    case Kind::Par:
      check_closed(tt, env, n.a, depth);
      check_closed(tt, env, n.b, depth);
      return;
    case Kind::Rel:
      check_closed(tt, env, n.a, depth);
      return;
    case Kind::Rec:
      check_closed(tt, env, n.a, depth + 1);
      return;
  }
}

// True when the de Bruijn variable bound at `depth` occurs at an active
// position (not under any prefix).
bool var_active(const TermTable& tt, TermId t, int depth) {
  const Term& n = tt.at(t);
  switch (n.kind) {
    case Kind::Nil:
    case Kind::Ref:
      return false;
    case Kind::Var:
      return n.aux == depth;
    case Kind::Prefix:
      return false;
    case Kind::Choice:
    case Kind::Par:
      return var_active(tt, n.a, depth) || var_active(tt, n.b, depth);
    case Kind::Rel:
      return var_active(tt, n.a, depth);
    case Kind::Rec:
      return var_active(tt, n.a, depth + 1);
  }
  return false;
}

void check_guarded_recs(const TermTable& tt, TermId t) {
  const Term& n = tt.at(t);
  switch (n.kind) {
    case Kind::Nil:
    case Kind::Var:
    case Kind::Ref:
      return;
    case Kind::Prefix:
    case Kind::Rel:
      check_guarded_recs(tt, n.a);
      return;
    case Kind::Choice:
    case Kind::Par:
      check_guarded_recs(tt, n.a);
      check_guarded_recs(tt, n.b);
      return;
    case Kind::Rec:
      if (var_active(tt, n.a, 0))
        throw UnguardedRecursion(n.hint >= 0 ? tt.name(n.hint) : "rec");
      check_guarded_recs(tt, n.a);
      return;
  }
}

void active_refs(const TermTable& tt, TermId t, std::vector<NameId>& out) {
  const Term& n = tt.at(t);
  switch (n.kind) {
    case Kind::Nil:
    case Kind::Var:
    case Kind::Prefix:
      return;
    case Kind::Ref:
      out.push_back(n.aux);
      return;
    case Kind::Choice:
    case Kind::Par:
      active_refs(tt, n.a, out);
      active_refs(tt, n.b, out);
      return;
    case Kind::Rel:
    case Kind::Rec:
      active_refs(tt, n.a, out);
      return;
  }
}

}  // namespace

void check_well_formed(const TermTable& tt, const ProgramEnv& env) {
  if (env.main < 0) throw WellFormedError("program has no main term");
  for (const auto& [name, body] : env.defs) {
    check_closed(tt, env, body, 0);
    check_guarded_recs(tt, body);
  }
  check_closed(tt, env, env.main, 0);
  check_guarded_recs(tt, env.main);

  // A cycle of definition references that never passes under a prefix is the
  // equation-level analogue of an unguarded mu.
  enum { kWhite, kGray, kBlack };
  std::unordered_map<NameId, int> color;
  std::function<void(NameId)> visit = [&](NameId name) {
    int& c = color[name];
    if (c == kBlack) return;
    if (c == kGray) throw UnguardedRecursion(tt.name(name));
    c = kGray;
    std::vector<NameId> refs;
    active_refs(tt, env.by_name.at(name), refs);
    for (NameId r : refs)
      if (env.by_name.count(r)) visit(r);
    color[name] = kBlack;
  };
  for (const auto& [name, body] : env.defs) visit(name);
}

}  // namespace pafas
