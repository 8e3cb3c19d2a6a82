#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cascaderisk/network.hpp"

namespace cascaderisk {

// Global balance-sheet scalars.
//   beta  : balance multiplier, B_i = beta * max(S^B_i, S^L_i)
//   eta   : reserve fraction,   E_i = eta * B_i
//   alpha : fund tax rate,      F_i = alpha * E_i
struct CalibrationParams {
  double beta = 10.0;
  double eta = 0.05;
  double alpha = 0.0;

  // Throws ParameterError unless beta > 0, 0 <= eta < 1 and 0 <= alpha <= 1.
  void validate() const;
};

class CalibratedNetwork {
 public:
  const FinancialNetwork& network() const { return net_; }
  const NodeStrengths& strengths() const { return strengths_; }
  const CalibrationParams& params() const { return params_; }
  std::size_t size() const { return net_.size(); }

  std::span<const double> balance() const { return balance_; }
  std::span<const double> reserve() const { return reserve_; }
  std::span<const double> fund_contribution() const { return fund_; }
  // D_i = B_i - S^L_i - E_i, assets held outside the money market.
  std::span<const double> external_assets() const { return external_; }

  double total_fund() const { return total_fund_; }

 private:
  friend CalibratedNetwork calibrate(const FinancialNetwork&, const CalibrationParams&);

  FinancialNetwork net_;
  NodeStrengths strengths_;
  CalibrationParams params_;
  std::vector<double> balance_;
  std::vector<double> reserve_;
  std::vector<double> fund_;
  std::vector<double> external_;
  double total_fund_ = 0.0;
};

// Throws InputError for an invalid network, ParameterError for out-of-range
// params and CalibrationError naming the first node whose external assets
// would be negative.
CalibratedNetwork calibrate(const FinancialNetwork& net, const CalibrationParams& params);

// A loss channel: when `source` (a borrower) is distressed, `target` (one of
// its lenders) loses up to `exposure` = A_{target,source}.
// weight = exposure / E_target, +inf when the lender holds no reserve.
struct PropagationEdge {
  NodeIndex source = 0;
  NodeIndex target = 0;
  double exposure = 0.0;
  double weight = 0.0;
};

// Adjacency of the distress-flow graph, grouped by source in ascending index
// order with targets ascending inside each group.
class PropagationWeights {
 public:
  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const PropagationEdge> edges() const { return edges_; }
  std::span<const PropagationEdge> out_edges(NodeIndex source) const {
    return std::span(edges_).subspan(offsets_[source], offsets_[source + 1] - offsets_[source]);
  }
  std::size_t first_edge(NodeIndex source) const { return offsets_[source]; }

  // Weight of the channel source -> target, 0 when absent.
  double weight(NodeIndex source, NodeIndex target) const;

 private:
  friend PropagationWeights propagation_weights(const CalibratedNetwork&);

  std::vector<std::size_t> offsets_;
  std::vector<PropagationEdge> edges_;
};

PropagationWeights propagation_weights(const CalibratedNetwork& cal);

}  // namespace cascaderisk
