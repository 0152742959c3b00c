#include "pafas/actions.hpp"

#include <algorithm>

#include "pafas/errors.hpp"

namespace pafas {

ActionTable& ActionTable::get() {
  static ActionTable table;
  return table;
}

ActionTable::ActionTable() {
  names_.push_back("tau");
  index_["tau"] = kTau;
  in = intern("in");
  out = intern("out");
  omega = intern("omega");
}

ActionId ActionTable::intern(std::string_view name) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  ActionId id = static_cast<ActionId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

const std::string& ActionTable::name(ActionId a) const {
  std::lock_guard<std::mutex> lock(mu_);
  return names_.at(static_cast<size_t>(a));
}

ActionSet aset(std::initializer_list<ActionId> xs) {
  ActionSet s(xs);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

bool aset_has(const ActionSet& s, ActionId a) {
  return std::binary_search(s.begin(), s.end(), a);
}

ActionSet aset_union(const ActionSet& a, const ActionSet& b) {
  ActionSet r;
  r.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

ActionSet aset_inter(const ActionSet& a, const ActionSet& b) {
  ActionSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

void aset_insert(ActionSet& s, ActionId a) {
  auto it = std::lower_bound(s.begin(), s.end(), a);
  if (it == s.end() || *it != a) s.insert(it, a);
}

std::string aset_str(const ActionSet& s) {
  std::string r = "{";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) r += ",";
    r += actions().name(s[i]);
  }
  return r + "}";
}

RelabelFn make_relabel(std::vector<std::pair<ActionId, ActionId>> entries) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  RelabelFn fn;
  for (auto& [src, dst] : entries) {
    if (src == kTau) throw WellFormedError("relabelling a tau source is not allowed");
    if (src != dst) fn.map.emplace_back(src, dst);
  }
  // Two different targets for one source would make the map ill-defined.
  for (size_t i = 1; i < fn.map.size(); ++i)
    if (fn.map[i - 1].first == fn.map[i].first)
      throw WellFormedError("conflicting relabel targets for " +
                            actions().name(fn.map[i].first));
  return fn;
}

RelabelFn make_hide(const ActionSet& names) {
  RelabelFn fn;
  for (ActionId a : names) fn.map.emplace_back(a, kTau);
  return fn;
}

}  // namespace pafas
