#include "cascaderisk/contagion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cascaderisk/error.hpp"
#include "cascaderisk/format.hpp"
#include "parallel.hpp"

namespace cascaderisk {

bool CascadeOutcome::is_defaulted(NodeIndex i) const {
  return std::binary_search(defaulted.begin(), defaulted.end(), i);
}

namespace {

void check_seed(const CalibratedNetwork& cal, NodeIndex seed) {
  if (seed >= cal.size()) {
    throw InputError("unknown seed node index " + std::to_string(seed) + " (network has " +
                     std::to_string(cal.size()) + " nodes)");
  }
}

std::vector<double> payouts_for(const CalibratedNetwork& cal, const PropagationWeights& weights,
                                NodeIndex seed) {
  std::vector<double> payouts(cal.size(), 0.0);
  const auto fund = cal.fund_contribution();
  double available = 0.0;
  for (NodeIndex k = 0; k < cal.size(); ++k) {
    if (k != seed) available += fund[k];
  }
  double requested = 0.0;
  for (const auto& e : weights.out_edges(seed)) requested += e.exposure;
  if (requested <= 0.0 || available <= 0.0) return payouts;

  const double ratio = std::min(1.0, available / requested);
  for (const auto& e : weights.out_edges(seed)) payouts[e.target] = e.exposure * ratio;
  return payouts;
}

// Weight of a first-round channel after the lender's payout is deducted.
double residual_weight(const PropagationEdge& e, double payout, double reserve) {
  const double loss = e.exposure - payout;
  if (!(loss > 0.0)) return 0.0;
  if (reserve > 0.0) return loss / reserve;
  return std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> compute_rescue_payouts(const CalibratedNetwork& cal, NodeIndex seed) {
  check_seed(cal, seed);
  return payouts_for(cal, propagation_weights(cal), seed);
}

CascadeOutcome run_cascade(const CalibratedNetwork& cal, const PropagationWeights& weights,
                           const SeedSpec& seed, const FundPolicy& policy,
                           const CascadeOptions& options) {
  check_seed(cal, seed.seed);
  if (cal.size() < 2) throw InputError("cascade requires at least two nodes");
  if (!(seed.initial_distress > 0.0 && seed.initial_distress <= 1.0)) {
    throw ParameterError("initial distress must lie in (0, 1], got " + format_double(seed.initial_distress));
  }
  if (weights.node_count() != cal.size()) {
    throw InvariantError("propagation weights do not match the calibrated network");
  }

  const auto n = cal.size();
  const auto reserve = cal.reserve();

  CascadeOutcome out;
  out.seed = seed.seed;
  out.initial_distress = seed.initial_distress;
  out.rescue_payouts = policy.enabled ? payouts_for(cal, weights, seed.seed) : std::vector<double>(n, 0.0);

  std::vector<double> h(n, 0.0);
  h[seed.seed] = seed.initial_distress;
  if (options.trace) out.trace.push_back(h);

  // Every channel of a node fires in the round right after the node first
  // turns positive, so tracking newly distressed nodes is enough to honour
  // the once-per-link rule.
  std::vector<NodeIndex> frontier{seed.seed};
  std::vector<double> previous;
  std::size_t round = 0;
  do {
    ++round;
    previous = h;
    for (const NodeIndex src : frontier) {
      const std::size_t base = weights.first_edge(src);
      const auto edges = weights.out_edges(src);
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        const double w = (round == 1 && policy.enabled)
                             ? residual_weight(e, out.rescue_payouts[e.target], reserve[e.target])
                             : e.weight;
        if (w > 0.0) h[e.target] = std::min(1.0, h[e.target] + w * previous[src]);
        if (options.trace) out.firings.push_back({round, base + k});
      }
    }
    if (options.trace) out.trace.push_back(h);

    frontier.clear();
    for (NodeIndex i = 0; i < n; ++i) {
      if (previous[i] == 0.0 && h[i] > 0.0 && !weights.out_edges(i).empty()) frontier.push_back(i);
    }
  } while (!frontier.empty());

  out.steps = round;
  for (NodeIndex i = 0; i < n; ++i) {
    if (i == seed.seed || h[i] >= kDefaultThreshold) out.defaulted.push_back(i);
  }
  out.final_distress = std::move(h);
  return out;
}

CascadeOutcome run_cascade(const CalibratedNetwork& cal, const SeedSpec& seed, const FundPolicy& policy,
                           const CascadeOptions& options) {
  return run_cascade(cal, propagation_weights(cal), seed, policy, options);
}

CascadeEnsemble run_ensemble(const CalibratedNetwork& cal, const FundPolicy& policy,
                             const EnsembleOptions& options) {
  if (cal.size() < 2) throw InputError("ensemble requires at least two nodes");
  const auto weights = propagation_weights(cal);
  CascadeEnsemble ens;
  ens.n_nodes = cal.size();
  ens.node_ids = cal.network().node_ids();
  ens.outcomes.resize(cal.size());
  detail::parallel_for(cal.size(), options.threads, [&](std::size_t s) {
    ens.outcomes[s] = run_cascade(cal, weights, SeedSpec{s, 1.0}, policy);
  });
  return ens;
}

void write_trace_csv(std::ostream& out, const CascadeOutcome& outcome, const FinancialNetwork& net) {
  out << "step,node,h\n";
  for (std::size_t step = 0; step < outcome.trace.size(); ++step) {
    for (NodeIndex i = 0; i < outcome.trace[step].size(); ++i) {
      out << step << ',' << net.node_id(i) << ',' << format_double(outcome.trace[step][i]) << '\n';
    }
  }
}

}  // namespace cascaderisk
