#include "cascaderisk/roi.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "cascaderisk/error.hpp"
#include "cascaderisk/format.hpp"

namespace cascaderisk {

namespace {

double node_nominal(const CalibratedNetwork& cal, const RoiRates& r, NodeIndex i) {
  const double alpha = cal.params().alpha;
  const double e = cal.reserve()[i];
  // roi_e (1 - alpha) E + roi_f alpha E, grouped so equal rates cancel alpha exactly
  const double reserve_term = e * (r.roi_e + alpha * (r.roi_f - r.roi_e));
  const double numerator =
      r.roi_int * cal.strengths().out_strength[i] + r.roi_ext * cal.external_assets()[i] + reserve_term;
  return numerator / cal.balance()[i];
}

double node_risk_adjusted(double nominal, double p) { return nominal * (1.0 - p) - p; }

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("default probability outside [0, 1]: " + format_double(p));
}

}  // namespace

void RoiRates::validate() const {
  for (const double r : {roi_int, roi_ext, roi_e, roi_f}) {
    if (!std::isfinite(r)) throw ParameterError("ROI rates must be finite");
  }
}

std::vector<double> nominal_roi(const CalibratedNetwork& cal, const RoiRates& rates) {
  rates.validate();
  std::vector<double> roi(cal.size());
  for (NodeIndex i = 0; i < cal.size(); ++i) {
    if (!(cal.balance()[i] > 0.0)) {
      throw InputError("node '" + cal.network().node_id(i) + "' has zero balance; ROI undefined");
    }
    roi[i] = node_nominal(cal, rates, i);
  }
  return roi;
}

std::vector<double> risk_adjusted_roi(std::span<const double> nominal, std::span<const double> p) {
  if (nominal.size() != p.size()) throw ParameterError("nominal ROI and probability vectors differ in size");
  std::vector<double> ra(nominal.size());
  for (std::size_t i = 0; i < nominal.size(); ++i) {
    check_probability(p[i]);
    ra[i] = node_risk_adjusted(nominal[i], p[i]);
  }
  return ra;
}

RoiReport roi_report(const CalibratedNetwork& cal, const RoiRates& rates, std::span<const double> default_prob,
                     DegenerateNodes degenerate) {
  rates.validate();
  if (default_prob.size() != cal.size()) throw ParameterError("default probability vector size mismatch");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  RoiReport rep;
  rep.node_ids = cal.network().node_ids();
  rep.alpha = cal.params().alpha;
  rep.default_prob.assign(default_prob.begin(), default_prob.end());
  rep.external_assets.assign(cal.external_assets().begin(), cal.external_assets().end());
  rep.nominal.assign(cal.size(), nan);
  rep.risk_adjusted.assign(cal.size(), nan);

  double weighted = 0.0;
  double weight = 0.0;
  double plain = 0.0;
  std::size_t counted = 0;
  for (NodeIndex i = 0; i < cal.size(); ++i) {
    check_probability(default_prob[i]);
    const double b = cal.balance()[i];
    if (!(b > 0.0)) {
      if (degenerate == DegenerateNodes::Reject) {
        throw InputError("node '" + cal.network().node_id(i) + "' has zero balance; ROI undefined");
      }
      continue;
    }
    rep.nominal[i] = node_nominal(cal, rates, i);
    rep.risk_adjusted[i] = node_risk_adjusted(rep.nominal[i], default_prob[i]);
    weighted += b * rep.risk_adjusted[i];
    weight += b;
    plain += rep.risk_adjusted[i];
    ++counted;
  }
  rep.market_weighted = counted > 0 ? weighted / weight : nan;
  rep.market_unweighted = counted > 0 ? plain / static_cast<double>(counted) : nan;
  return rep;
}

void write_roi_csv(std::ostream& out, const RoiReport& rep) {
  out << "node,roi_nominal,roi_risk_adjusted,default_prob\n";
  for (std::size_t i = 0; i < rep.node_ids.size(); ++i) {
    out << rep.node_ids[i] << ',' << format_double(rep.nominal[i]) << ',' << format_double(rep.risk_adjusted[i])
        << ',' << format_double(rep.default_prob[i]) << '\n';
  }
}

}  // namespace cascaderisk
