#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cascaderisk/calibration.hpp"

namespace cascaderisk {

// Distress at or above this level counts as default. The cap assigns exactly
// 1.0; the slack absorbs accumulated rounding.
inline constexpr double kDefaultThreshold = 1.0 - 1e-12;

struct SeedSpec {
  NodeIndex seed = 0;
  double initial_distress = 1.0;  // psi_s in (0, 1]
};

// Rescue-fund policy. When enabled, the seed draws and loses its own share
// F_s first; the remaining pool sum_{k != s} F_k is paid to the seed's direct
// lenders in proportion to their exposures before the first propagation round.
struct FundPolicy {
  bool enabled = false;

  static FundPolicy none() { return {false}; }
  static FundPolicy rescue() { return {true}; }
};

struct LinkFiring {
  std::size_t step = 0;
  std::size_t edge = 0;  // index into PropagationWeights::edges()
};

struct CascadeOutcome {
  NodeIndex seed = 0;
  double initial_distress = 1.0;
  std::vector<double> final_distress;
  std::vector<NodeIndex> defaulted;   // ascending, always contains the seed
  std::size_t steps = 0;              // propagation rounds executed, >= 1
  std::vector<double> rescue_payouts; // per node, nonzero only for the seed's lenders
  // Filled only when tracing: trace[k] is h after round k (trace[0] initial).
  std::vector<std::vector<double>> trace;
  std::vector<LinkFiring> firings;

  bool is_defaulted(NodeIndex i) const;
};

// Per-node payouts for a default of `seed`: each lender j requests A_js and
// receives A_js * min(1, pool / total requests).
std::vector<double> compute_rescue_payouts(const CalibratedNetwork& cal, NodeIndex seed);

struct CascadeOptions {
  bool trace = false;
};

// Synchronous DebtRank rounds. Each round every unused channel whose source
// had positive distress at the end of the previous round fires once:
//   h_target <- min(1, h_target + weight * h_source(previous round)).
// The first round starts from the seed; with the fund enabled its channels
// carry the residual loss A_js - payout_j instead of A_js.
CascadeOutcome run_cascade(const CalibratedNetwork& cal, const PropagationWeights& weights,
                           const SeedSpec& seed, const FundPolicy& policy,
                           const CascadeOptions& options = {});
CascadeOutcome run_cascade(const CalibratedNetwork& cal, const SeedSpec& seed, const FundPolicy& policy,
                           const CascadeOptions& options = {});

struct CascadeEnsemble {
  std::size_t n_nodes = 0;
  std::vector<std::string> node_ids;
  std::vector<CascadeOutcome> outcomes;  // outcomes[s] is seeded at node s
};

struct EnsembleOptions {
  unsigned threads = 1;
};

// One full-distress cascade per node, assembled in node order. The result is
// identical for every thread count.
CascadeEnsemble run_ensemble(const CalibratedNetwork& cal, const FundPolicy& policy,
                             const EnsembleOptions& options = {});

// `step,node,h` rows for every traced round.
void write_trace_csv(std::ostream& out, const CascadeOutcome& outcome, const FinancialNetwork& net);

}  // namespace cascaderisk
