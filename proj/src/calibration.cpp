#include "cascaderisk/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascaderisk/error.hpp"
#include "cascaderisk/format.hpp"

namespace cascaderisk {

void CalibrationParams::validate() const {
  if (!(std::isfinite(beta) && beta > 0.0)) {
    throw ParameterError("beta must be finite and > 0, got " + format_double(beta));
  }
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw ParameterError("eta must lie in [0, 1), got " + format_double(eta));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " + format_double(alpha));
  }
}

CalibratedNetwork calibrate(const FinancialNetwork& net, const CalibrationParams& params) {
  params.validate();
  const auto report = validate_network(net);
  if (!report.ok()) throw InputError("cannot calibrate invalid network: " + report.errors.front().message);

  CalibratedNetwork cal;
  cal.net_ = net;
  cal.params_ = params;
  cal.strengths_ = node_strengths(net);

  const auto n = net.size();
  cal.balance_.resize(n);
  cal.reserve_.resize(n);
  cal.fund_.resize(n);
  cal.external_.resize(n);
  for (NodeIndex i = 0; i < n; ++i) {
    const double lent = cal.strengths_.out_strength[i];
    const double borrowed = cal.strengths_.in_strength[i];
    cal.balance_[i] = params.beta * std::max(borrowed, lent);
    cal.reserve_[i] = params.eta * cal.balance_[i];
    cal.fund_[i] = params.alpha * cal.reserve_[i];
    cal.external_[i] = cal.balance_[i] - lent - cal.reserve_[i];
    if (cal.external_[i] < 0.0) {
      throw CalibrationError("node '" + net.node_id(i) + "' has negative external assets D=" +
                             format_double(cal.external_[i]) + " (beta=" + format_double(params.beta) +
                             " too small for its money-market exposure)");
    }
    cal.total_fund_ += cal.fund_[i];
  }
  return cal;
}

double PropagationWeights::weight(NodeIndex source, NodeIndex target) const {
  for (const auto& e : out_edges(source)) {
    if (e.target == target) return e.weight;
  }
  return 0.0;
}

PropagationWeights propagation_weights(const CalibratedNetwork& cal) {
  const auto n = cal.size();
  const auto reserve = cal.reserve();
  const auto loans = cal.network().loans();

  PropagationWeights pw;
  pw.offsets_.assign(n + 1, 0);
  for (const auto& l : loans) ++pw.offsets_[l.borrower + 1];
  for (std::size_t i = 0; i < n; ++i) pw.offsets_[i + 1] += pw.offsets_[i];

  // Loans are sorted by lender, so filling per-borrower buckets in loan order
  // leaves every bucket sorted by target.
  pw.edges_.resize(loans.size());
  std::vector<std::size_t> cursor(pw.offsets_.begin(), pw.offsets_.end() - 1);
  for (const auto& l : loans) {
    const double e = reserve[l.lender];
    const double w = e > 0.0 ? l.amount / e : std::numeric_limits<double>::infinity();
    pw.edges_[cursor[l.borrower]++] = {l.borrower, l.lender, l.amount, w};
  }
  return pw;
}

}  // namespace cascaderisk
