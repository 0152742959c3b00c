#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pafas {

// Visible actions are interned process-wide; id 0 is reserved for tau.
// The alphabet itself is unbounded — only the finitely many names that
// actually occur are ever materialized.
using ActionId = int32_t;
constexpr ActionId kTau = 0;

class ActionTable {
 public:
  static ActionTable& get();

  ActionId intern(std::string_view name);  // "tau" -> kTau
  const std::string& name(ActionId a) const;

  // Recognized by the performance layer; otherwise ordinary visible actions.
  ActionId in, out, omega;

 private:
  ActionTable();
  std::deque<std::string> names_;
  std::unordered_map<std::string, ActionId> index_;
  mutable std::mutex mu_;
};

inline ActionTable& actions() { return ActionTable::get(); }

// Finite set of visible actions, sorted and duplicate-free.
using ActionSet = std::vector<ActionId>;

ActionSet aset(std::initializer_list<ActionId> xs);
bool aset_has(const ActionSet& s, ActionId a);
ActionSet aset_union(const ActionSet& a, const ActionSet& b);
ActionSet aset_inter(const ActionSet& a, const ActionSet& b);
void aset_insert(ActionSet& s, ActionId a);
std::string aset_str(const ActionSet& s);

// Sync set of a parallel composition: an explicit finite set, or the
// co-finite "everything but omega" used by the || shorthand.
struct SyncSet {
  bool all_but_omega = false;
  ActionSet acts;  // unused when all_but_omega

  bool contains(ActionId a) const {
    if (a == kTau) return false;
    if (all_but_omega) return a != actions().omega;
    return aset_has(acts, a);
  }
  bool operator==(const SyncSet& o) const {
    return all_but_omega == o.all_but_omega && acts == o.acts;
  }
};

// General relabelling: finite partial map over visible actions; targets may
// be tau (hiding); identity elsewhere; tau always maps to tau.
struct RelabelFn {
  // Sorted by source; no identity entries; target kTau hides.
  std::vector<std::pair<ActionId, ActionId>> map;

  ActionId apply(ActionId a) const {
    if (a == kTau) return kTau;
    for (const auto& [src, dst] : map)
      if (src == a) return dst;
    return a;
  }
  bool operator==(const RelabelFn& o) const { return map == o.map; }
};

RelabelFn make_relabel(std::vector<std::pair<ActionId, ActionId>> entries);
RelabelFn make_hide(const ActionSet& names);

}  // namespace pafas
