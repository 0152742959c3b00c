#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pafas/perf.hpp"

namespace pafas {

struct RpEntry {
  int64_t n = 0;
  int64_t value = 0;
  Path witness;
};

struct AsymEntry {
  std::string method;  // "baseline" | "improved"
  AsymResult result;
};

// Everything cmd_analyze learned about one input; witnesses refer to node
// ids of the reduced graph.
struct PerfReport {
  static constexpr int kSchemaVersion = 1;

  std::string input;
  std::vector<std::string> warnings;
  size_t rts_nodes = 0, rts_action_edges = 0, rts_time_edges = 0;
  size_t rrts_nodes = 0, rrts_action_edges = 0, rrts_time_edges = 0;
  std::optional<CatWitness> catastrophic;
  std::vector<AsymEntry> asym;
  std::vector<RpEntry> rp;
};

}  // namespace pafas
