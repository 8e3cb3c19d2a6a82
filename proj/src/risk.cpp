#include "cascaderisk/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "cascaderisk/error.hpp"
#include "cascaderisk/format.hpp"

namespace cascaderisk {

namespace {

std::string node_label(std::span<const std::string> ids, NodeIndex i) {
  return i < ids.size() ? "'" + ids[i] + "'" : "#" + std::to_string(i);
}

void check_exogenous(std::span<const double> p_exo, std::size_t n) {
  if (p_exo.size() != n) {
    throw ParameterError("exogenous probability vector has " + std::to_string(p_exo.size()) +
                         " entries, network has " + std::to_string(n));
  }
  for (const double p : p_exo) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("exogenous probability outside [0, 1]: " + format_double(p));
  }
}

}  // namespace

void ConditionalDefaults::set(NodeIndex i, NodeIndex j) {
  auto& cell = q_[i * n_ + j];
  if (cell == 0) {
    cell = 1;
    ++delta_[i];
  }
}

std::size_t ConditionalDefaults::total_defaults() const {
  return std::accumulate(delta_.begin(), delta_.end(), std::size_t{0});
}

ConditionalDefaults conditional_default_matrix(const CascadeEnsemble& ens) {
  if (ens.outcomes.size() != ens.n_nodes) {
    throw InputError("incomplete ensemble: " + std::to_string(ens.outcomes.size()) + " outcomes for " +
                     std::to_string(ens.n_nodes) + " nodes");
  }
  ConditionalDefaults q(ens.n_nodes);
  for (NodeIndex j = 0; j < ens.n_nodes; ++j) {
    const auto& outcome = ens.outcomes[j];
    if (outcome.seed != j) throw InputError("ensemble outcome " + std::to_string(j) + " is not seeded at node " + std::to_string(j));
    for (const NodeIndex i : outcome.defaulted) {
      if (i >= ens.n_nodes) throw InvariantError("defaulted node index out of range");
      if (i != j) q.set(i, j);
    }
  }
  return q;
}

CascadeRisk cascade_risk(std::span<const std::size_t> delta, std::size_t n) {
  if (n < 2) throw ParameterError("cascade risk needs N >= 2");
  if (delta.size() != n) throw ParameterError("delta has " + std::to_string(delta.size()) + " entries, expected " + std::to_string(n));
  CascadeRisk risk;
  risk.node.reserve(n);
  std::size_t total = 0;
  const double denom = static_cast<double>(n - 1);
  for (const auto d : delta) {
    if (d > n - 1) throw ParameterError("delta exceeds N - 1");
    risk.node.push_back(static_cast<double>(d) / denom);
    total += d;
  }
  risk.system = static_cast<double>(total) / (static_cast<double>(n) * denom);
  return risk;
}

std::vector<double> default_probabilities(std::span<const std::size_t> delta, double p_exo,
                                          std::span<const std::string> node_ids) {
  if (!(p_exo > 0.0 && p_exo <= 1.0)) throw ParameterError("p_exo must lie in (0, 1], got " + format_double(p_exo));
  std::vector<double> p;
  p.reserve(delta.size());
  for (NodeIndex i = 0; i < delta.size(); ++i) {
    const double pi = static_cast<double>(1 + delta[i]) * p_exo;
    if (pi > 1.0) {
      throw ParameterError("default probability of node " + node_label(node_ids, i) + " is " + format_double(pi) +
                           " > 1; p_exo too large for this network");
    }
    p.push_back(pi);
  }
  return p;
}

std::vector<double> systemic_default_probabilities(const ConditionalDefaults& q, std::span<const double> p_exo) {
  check_exogenous(p_exo, q.size());
  std::vector<double> ps(q.size(), 0.0);
  for (NodeIndex i = 0; i < q.size(); ++i) {
    for (NodeIndex j = 0; j < q.size(); ++j) {
      if (j != i && q.q(i, j)) ps[i] += p_exo[j];
    }
  }
  return ps;
}

std::vector<double> default_probabilities(const ConditionalDefaults& q, std::span<const double> p_exo,
                                          std::span<const std::string> node_ids) {
  auto p = systemic_default_probabilities(q, p_exo);
  for (NodeIndex i = 0; i < p.size(); ++i) {
    p[i] += p_exo[i];
    if (p[i] > 1.0) {
      throw ParameterError("default probability of node " + node_label(node_ids, i) + " is " + format_double(p[i]) + " > 1");
    }
  }
  return p;
}

std::vector<double> cascade_risk_general(const ConditionalDefaults& q, std::span<const double> p_exo) {
  check_exogenous(p_exo, q.size());
  const auto n = q.size();
  if (n < 2) throw ParameterError("cascade risk needs N >= 2");

  const bool uniform = std::all_of(p_exo.begin(), p_exo.end(), [&](double p) { return p == p_exo.front(); });
  if (uniform) {
    if (!(p_exo.front() > 0.0)) throw ParameterError("exogenous probabilities are all zero");
    return cascade_risk(q.delta(), n).node;
  }

  std::vector<double> risk(n, 0.0);
  for (NodeIndex i = 0; i < n; ++i) {
    double num = 0.0;
    double den = 0.0;
    for (NodeIndex j = 0; j < n; ++j) {
      if (j == i) continue;
      den += p_exo[j];
      if (q.q(i, j)) num += p_exo[j];
    }
    if (!(den > 0.0)) {
      throw ParameterError("exogenous probabilities of every node other than #" + std::to_string(i) + " are zero");
    }
    risk[i] = num / den;
  }
  return risk;
}

DebtRankReport debtrank_metric(const CascadeEnsemble& ens, std::span<const double> economic_value) {
  if (economic_value.size() != ens.n_nodes) throw ParameterError("economic value vector size mismatch");
  if (ens.outcomes.size() != ens.n_nodes) throw InputError("incomplete ensemble");
  double total = 0.0;
  for (const double v : economic_value) {
    if (!(v >= 0.0)) throw ParameterError("economic values must be nonnegative");
    total += v;
  }
  if (!(total > 0.0)) throw InputError("total economic value is zero; DebtRank undefined");

  std::vector<double> v(economic_value.begin(), economic_value.end());
  for (double& x : v) x /= total;

  DebtRankReport report;
  report.per_seed.reserve(ens.n_nodes);
  double sum = 0.0;
  for (NodeIndex j = 0; j < ens.n_nodes; ++j) {
    const auto& outcome = ens.outcomes[j];
    double dr = 0.0;
    for (NodeIndex i = 0; i < ens.n_nodes; ++i) dr += outcome.final_distress[i] * v[i];
    dr -= outcome.initial_distress * v[outcome.seed];
    report.per_seed.push_back(dr);
    sum += dr;
  }
  report.average = ens.n_nodes > 0 ? sum / static_cast<double>(ens.n_nodes) : 0.0;
  return report;
}

DebtRankReport debtrank_metric(const CascadeEnsemble& ens, const NodeStrengths& strengths) {
  if (!(strengths.total_lent() > 0.0)) throw InputError("total lending is zero; DebtRank undefined");
  return debtrank_metric(ens, strengths.out_strength);
}

RiskReport risk_report(const CascadeEnsemble& ens, const NodeStrengths& strengths, double p_exo) {
  const auto q = conditional_default_matrix(ens);
  RiskReport r;
  r.node_ids = ens.node_ids;
  r.delta.assign(q.delta().begin(), q.delta().end());
  r.cascade = cascade_risk(r.delta, ens.n_nodes);
  r.default_prob = default_probabilities(r.delta, p_exo, r.node_ids);
  r.exogenous_prob = p_exo;
  r.debtrank = debtrank_metric(ens, strengths);
  return r;
}

void write_risk_csv(std::ostream& out, const RiskReport& r) {
  out << "node,delta,cascade_risk,default_prob,debtrank\n";
  double mean_p = 0.0;
  std::size_t total = 0;
  for (NodeIndex i = 0; i < r.delta.size(); ++i) {
    out << r.node_ids[i] << ',' << r.delta[i] << ',' << format_double(r.cascade.node[i]) << ','
        << format_double(r.default_prob[i]) << ',' << format_double(r.debtrank.per_seed[i]) << '\n';
    mean_p += r.default_prob[i];
    total += r.delta[i];
  }
  if (!r.delta.empty()) mean_p /= static_cast<double>(r.delta.size());
  out << "system," << total << ',' << format_double(r.cascade.system) << ',' << format_double(mean_p) << ','
      << format_double(r.debtrank.average) << '\n';
}

}  // namespace cascaderisk
