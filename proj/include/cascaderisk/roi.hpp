#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cascaderisk/calibration.hpp"

namespace cascaderisk {

// Per-horizon returns on each asset class of a balance sheet.
struct RoiRates {
  double roi_int = 0.04;  // interbank loans
  double roi_ext = 0.07;  // assets outside the money market
  double roi_e = 0.03;    // balance-sheet reserve
  double roi_f = 0.02;    // share held in the rescue fund

  void validate() const;
};

// ROI_i^N = [roi_int S^L_i + roi_ext D_i + roi_e (1 - alpha) E_i + roi_f alpha E_i] / B_i.
// Throws InputError for a node with zero balance.
std::vector<double> nominal_roi(const CalibratedNetwork& cal, const RoiRates& rates);

// ROI_i^RA = ROI_i^N (1 - p_i) - p_i. Throws ParameterError for p outside [0, 1].
std::vector<double> risk_adjusted_roi(std::span<const double> nominal, std::span<const double> p);

enum class DegenerateNodes {
  Reject,  // zero-balance nodes throw
  Skip,    // zero-balance nodes get NaN and are left out of market means
};

struct RoiReport {
  std::vector<std::string> node_ids;
  std::vector<double> nominal;
  std::vector<double> risk_adjusted;
  std::vector<double> default_prob;
  std::vector<double> external_assets;
  double alpha = 0.0;
  double market_weighted = 0.0;    // balance-weighted mean of ROI^RA
  double market_unweighted = 0.0;  // plain mean of ROI^RA
};

RoiReport roi_report(const CalibratedNetwork& cal, const RoiRates& rates, std::span<const double> default_prob,
                     DegenerateNodes degenerate = DegenerateNodes::Reject);

// `node,roi_nominal,roi_risk_adjusted,default_prob` rows.
void write_roi_csv(std::ostream& out, const RoiReport& report);

}  // namespace cascaderisk
