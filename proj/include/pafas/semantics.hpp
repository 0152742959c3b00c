#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "pafas/rts.hpp"
#include "pafas/term.hpp"

namespace pafas {

struct TimeStep {
  ActionSet forbid;  // U: actions that cannot be refused; empty = full step
  TermId to = -1;
};

struct BuildOpts {
  size_t cap = 1000000;
  // Canonicalize states by folding urgency marks that can influence no
  // refusal set and block no time step (sound only for programs without
  // syntactic urgent prefixes; build_rts checks and ignores the flag
  // otherwise). Needed to reproduce the reference state counts.
  bool fold_inert_urgency = false;
};

// The SOS engine: action successors, conditional time steps with the maximal
// refusal set represented by its complement U, and state-graph construction.
// Definition references and mu-binders unfold on demand, memoized per term.
class Semantics {
 public:
  Semantics(TermTable& tt, const ProgramEnv& env) : tt_(tt), env_(env) {}

  // Exactly the pairs (alpha, P') with t --alpha--> P'.
  const std::vector<std::pair<ActionId, TermId>>& successors(TermId t);

  // The unique conditional time step of t, if any. An enabled urgent tau
  // means time cannot pass at all (absent result).
  std::optional<TimeStep> time_step(TermId t);

  // Unfold references/mu at active positions; prefix bodies stay folded.
  // This is the canonical state representation.
  TermId unfold_active(TermId t);

  // Strip urgency marks with no semantic effect (see BuildOpts).
  TermId fold_inert_urgency(TermId t);

  // True when neither t nor any definition reachable from it contains a
  // syntactically urgent prefix.
  bool syntax_lazy(TermId t);

  Rts build_rts(TermId root, const BuildOpts& opts = {});

  TermTable& terms() { return tt_; }
  const ProgramEnv& env() const { return env_; }

 private:
  struct UrgInfo {
    ActionSet urgent;  // urgent actions exposed at this level
    bool blocked;      // an urgent tau is enabled somewhere active
  };
  UrgInfo urg_info(TermId t);
  TermId resolve(TermId t);  // one unfolding step for Ref/Rec
  TermId subst(TermId t, int32_t depth, TermId replacement,
               std::unordered_map<uint64_t, TermId>& memo);

  struct CleanFrame;
  TermId clean_rec(TermId t, const CleanFrame* ctx);

  TermTable& tt_;
  const ProgramEnv& env_;
  std::unordered_map<TermId, std::vector<std::pair<ActionId, TermId>>> succ_memo_;
  std::unordered_map<TermId, std::optional<TimeStep>> time_memo_;
  std::unordered_map<TermId, TermId> unfold_memo_;
  std::unordered_map<TermId, UrgInfo> urg_memo_;
  std::unordered_map<TermId, bool> lazy_memo_;
};

// Product construction: applies the parallel-composition SOS rules to the
// component graphs' edges. Components must be term-backed raw builds; the
// result is label-identical to build_rts of the syntactic parallel term.
Rts compose_parallel(TermTable& tt, const Rts& r1, const Rts& r2, SyncId sync,
                     size_t cap = 1000000);

}  // namespace pafas
