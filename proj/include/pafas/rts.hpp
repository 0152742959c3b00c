#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pafas/actions.hpp"
#include "pafas/term.hpp"

namespace pafas {

// One conditional time step: the state can let a unit of time pass while
// refusing any X with X ∩ forbid = ∅. forbid = ∅ is a full time step.
struct TimeEdge {
  ActionSet forbid;
  int32_t to = -1;
  bool full() const { return forbid.empty(); }
};

struct RtsNode {
  TermId term = -1;   // -1 for synthetic graphs (tests, XML import)
  std::string label;
  std::vector<std::pair<ActionId, int32_t>> acts;  // sorted by (action, to)
  std::optional<TimeEdge> time;                    // at most one per node
};

// Rooted refusal transition system. Node ids are dense; every stored node is
// reachable from the root.
struct Rts {
  int32_t root = 0;
  std::vector<RtsNode> nodes;

  size_t action_edge_count() const {
    size_t n = 0;
    for (const auto& nd : nodes) n += nd.acts.size();
    return n;
  }
  size_t time_edge_count() const {
    size_t n = 0;
    for (const auto& nd : nodes) n += nd.time.has_value() ? 1 : 0;
    return n;
  }
  size_t edge_count() const { return action_edge_count() + time_edge_count(); }
};

// Structural equality keyed by node labels: same root label and, for every
// label, the same action edges and time edge (as label pairs). This is the
// isomorphism check used for product-vs-direct builds and XML round-trips;
// it requires labels to be unique per node, which holds for term-backed
// graphs (labels are canonical renderings).
bool same_by_labels(const Rts& a, const Rts& b, std::string* why = nullptr);

// Keep exactly the nodes in `keep` (which must contain the root), renumber
// densely in ascending old-id order. orig_ids, when given, receives the old
// id of each new node.
Rts restrict_nodes(const Rts& g, const std::vector<bool>& keep,
                   std::vector<int32_t>* orig_ids = nullptr);

// Nodes reachable from the root along action edges and time edges.
std::vector<bool> reachable_nodes(const Rts& g);

}  // namespace pafas
