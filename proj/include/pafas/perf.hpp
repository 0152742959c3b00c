#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pafas/rational.hpp"
#include "pafas/rts.hpp"
#include "pafas/semantics.hpp"

namespace pafas {

// One concrete step of a witness path, referring to node ids of the graph
// the witness was computed from.
struct Step {
  bool is_time = false;
  ActionId act = kTau;  // meaningful when !is_time
  ActionSet forbid;     // meaningful when is_time
  int32_t from = -1;
  int32_t to = -1;
};
using Path = std::vector<Step>;

std::string step_label(const Step& s);
std::string path_str(const Path& p);

// Checks that every step exists in g and the path is contiguous.
bool replay_path(const Rts& g, const Path& p, std::string* why = nullptr);

// ---------------------------------------------------------------------------
// Reduction: drop conditional time steps that can never contribute to a full
// step of P || U_n for any request count. A user phase makes `in` urgent
// until all n requests are consumed and `out` urgent while a response is
// pending, so an edge forbidding both can never fire; edges forbidding only
// one survive iff the process can be reached in a phase where the other side
// of the user is quiet, which the balance search below decides.
struct ReduceStats {
  size_t removed_time_edges = 0;
  size_t removed_nodes = 0;
  int rounds = 0;
};
Rts reduce_rts(const Rts& g, ReduceStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Response discipline: along every path, #out never exceeds #in.
struct ResponseResult {
  bool ok = true;
  Path witness;  // path whose final step overdraws, when !ok
};
ResponseResult check_response(const Rts& g);

// ---------------------------------------------------------------------------
// Catastrophic cycles: a cycle with at least one time step and no in/out.
struct CatWitness {
  Path cycle;  // closed: cycle.front().from == cycle.back().to
};
std::optional<CatWitness> find_catastrophic(const Rts& rr);

// ---------------------------------------------------------------------------
// Asymptotic (worst-case average) performance.
enum class Method { kBaseline, kImproved };

enum class AsymStatus {
  kOk,              // performance = 1 / (minimum cycle mean)
  kNoCycle,         // G' acyclic: the system quiesces, no asymptotic rate
  kZeroThroughput,  // a cycle of full steps with no in's (non-response input)
};

struct GSizes {
  size_t g_nodes = 0;
  size_t g_action_edges = 0;
  size_t g_full_steps = 0;
  size_t gp_nodes = 0;
  size_t gp_edges = 0;
};

struct AsymResult {
  AsymStatus status = AsymStatus::kNoCycle;
  Rational performance;  // valid when kOk
  Rational mean;         // minimum cycle mean; valid unless kNoCycle
  Path witness;          // worst cycle, expanded to rr-level steps (closed)
  GSizes sizes;
};
AsymResult asymptotic_performance(const Rts& rr, Method method);

// ---------------------------------------------------------------------------
// Exact response performance rp(n): most time steps on an n-critical path
// (at most n in's, at most n-1 out's, time steps full until the n-th in and
// merely out-permitting afterwards).
struct RpResult {
  int64_t value = 0;
  Path witness;
};
RpResult response_performance(const Rts& rr, int64_t n);

// Independent cross-check: composes the raw RTS of p with the raw RTS of the
// n-request user via compose_parallel and maximizes full steps over
// omega-free paths of the product. No reduction, no layer DP.
int64_t oracle_rp(TermTable& tt, Semantics& sem, TermId p, int64_t n,
                  size_t cap = 400000);

}  // namespace pafas
