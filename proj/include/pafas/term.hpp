#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pafas/actions.hpp"

namespace pafas {

using TermId = int32_t;
using NameId = int32_t;
using SyncId = int32_t;
using RelabelId = int32_t;

enum class Kind : uint8_t { Nil, Prefix, Choice, Par, Rel, Var, Rec, Ref };

// One hash-consed node. Bound variables are de Bruijn indices, so equal
// TermIds coincide with alpha-equivalence and node merging in state graphs
// is pointer equality.
struct Term {
  Kind kind;
  bool urgent = false;  // Prefix
  ActionId act = kTau;  // Prefix
  TermId a = -1;        // Prefix body / Choice left / Par left / Rel body / Rec body
  TermId b = -1;        // Choice right / Par right
  int32_t aux = -1;     // Par: SyncId; Rel: RelabelId; Var: index; Ref: NameId
  NameId hint = -1;     // Rec: binder name for rendering (not part of identity)
};

class TermTable {
 public:
  TermId nil();
  TermId prefix(bool urgent, ActionId act, TermId body);
  TermId choice(TermId l, TermId r);
  TermId par(TermId l, SyncId sync, TermId r);
  TermId rel(TermId body, RelabelId fn);
  TermId var(int32_t index);
  TermId rec(TermId body, NameId hint);
  TermId ref(NameId name);

  const Term& at(TermId t) const { return nodes_[static_cast<size_t>(t)]; }
  size_t size() const { return nodes_.size(); }

  NameId intern_name(std::string_view s);
  const std::string& name(NameId n) const { return names_[static_cast<size_t>(n)]; }
  bool has_name(std::string_view s) const;

  SyncId intern_sync(SyncSet s);
  const SyncSet& sync(SyncId s) const { return syncs_[static_cast<size_t>(s)]; }

  RelabelId intern_relabel(RelabelFn fn);
  const RelabelFn& relabel(RelabelId r) const { return relabels_[static_cast<size_t>(r)]; }

 private:
  TermId make(Term node);

  std::deque<Term> nodes_;
  std::unordered_map<uint64_t, std::vector<TermId>> index_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, NameId> name_index_;
  std::vector<SyncSet> syncs_;
  std::vector<RelabelFn> relabels_;
};

// A parsed program: ordered named definitions plus the entry term.
struct ProgramEnv {
  std::vector<std::pair<NameId, TermId>> defs;
  std::unordered_map<NameId, TermId> by_name;
  TermId main = -1;

  std::optional<TermId> lookup(NameId n) const {
    auto it = by_name.find(n);
    if (it == by_name.end()) return std::nullopt;
    return it->second;
  }
};

// Deterministic key: fixed parenthesization, binders printed positionally
// (de Bruijn), no algebraic rewriting. Equal keys iff alpha-equivalent.
std::string canonical_key(const TermTable& tt, TermId t);

// Human-readable concrete syntax that re-parses to an alpha-equivalent term.
std::string render(const TermTable& tt, TermId t);
std::string render_program(const TermTable& tt, const ProgramEnv& env);

// Closedness (no free de Bruijn variables, all references defined) and
// guardedness (every mu-variable and every definition cycle passes under a
// prefix). Throws UnboundVariable / UnguardedRecursion.
void check_well_formed(const TermTable& tt, const ProgramEnv& env);

}  // namespace pafas
