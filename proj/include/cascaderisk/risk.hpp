#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cascaderisk/contagion.hpp"

namespace cascaderisk {

// Q(i|j) = 1 iff node i defaults in the cascade seeded at j (i != j), and
// delta_i = sum_{j != i} Q(i|j).
class ConditionalDefaults {
 public:
  ConditionalDefaults() = default;
  explicit ConditionalDefaults(std::size_t n) : n_(n), q_(n * n, 0), delta_(n, 0) {}

  std::size_t size() const { return n_; }
  bool q(NodeIndex i, NodeIndex j) const { return q_[i * n_ + j] != 0; }
  void set(NodeIndex i, NodeIndex j);
  std::span<const std::size_t> delta() const { return delta_; }
  std::size_t total_defaults() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> q_;
  std::vector<std::size_t> delta_;
};

// Throws InputError unless the ensemble holds exactly one outcome per node in
// node order.
ConditionalDefaults conditional_default_matrix(const CascadeEnsemble& ens);

struct CascadeRisk {
  std::vector<double> node;  // p_i^C = delta_i / (N - 1)
  double system = 0.0;       // p^C   = sum delta_i / (N (N - 1))
};

CascadeRisk cascade_risk(std::span<const std::size_t> delta, std::size_t n);

// Uniform exogenous probability: p_i = (1 + delta_i) p^O. Throws
// ParameterError naming the node when a probability would exceed 1.
std::vector<double> default_probabilities(std::span<const std::size_t> delta, double p_exo,
                                          std::span<const std::string> node_ids = {});

// Heterogeneous exogenous vector: p_i^S = sum_{j != i} Q(i|j) p_j^O.
std::vector<double> systemic_default_probabilities(const ConditionalDefaults& q,
                                                   std::span<const double> p_exo);

// p_i = p_i^O + p_i^S, intersection term omitted.
std::vector<double> default_probabilities(const ConditionalDefaults& q, std::span<const double> p_exo,
                                          std::span<const std::string> node_ids = {});

// p_i^C = sum_{j != i} Q(i|j) p_j^O / sum_{j != i} p_j^O. A bitwise-uniform
// vector takes the delta_i / (N - 1) route.
std::vector<double> cascade_risk_general(const ConditionalDefaults& q, std::span<const double> p_exo);

struct DebtRankReport {
  std::vector<double> per_seed;  // DR_j
  double average = 0.0;
};

// DR_j = sum_i h_i(final, seed j) v_i - psi_j v_j, with v the out-strength
// share of each node. Throws InputError when nothing is lent.
DebtRankReport debtrank_metric(const CascadeEnsemble& ens, const NodeStrengths& strengths);
// Same with an explicit economic-value vector (normalized internally).
DebtRankReport debtrank_metric(const CascadeEnsemble& ens, std::span<const double> economic_value);

struct RiskReport {
  std::vector<std::string> node_ids;
  std::vector<std::size_t> delta;
  CascadeRisk cascade;
  std::vector<double> default_prob;
  double exogenous_prob = 0.0;
  DebtRankReport debtrank;
};

RiskReport risk_report(const CascadeEnsemble& ens, const NodeStrengths& strengths, double p_exo);

// `node,delta,cascade_risk,default_prob,debtrank` rows, then a `system` row
// with total delta, p^C, mean default probability and average DR.
void write_risk_csv(std::ostream& out, const RiskReport& report);

}  // namespace cascaderisk
