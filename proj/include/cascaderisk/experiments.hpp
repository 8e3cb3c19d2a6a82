#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cascaderisk/calibration.hpp"
#include "cascaderisk/contagion.hpp"
#include "cascaderisk/risk.hpp"
#include "cascaderisk/roi.hpp"

namespace cascaderisk {

// Everything computed for one (beta, eta, alpha) point: calibration, the
// full rescue-enabled ensemble and the derived risk and ROI figures.
struct ScenarioResult {
  CalibratedNetwork calibrated;
  CascadeEnsemble ensemble;
  ConditionalDefaults defaults;
  CascadeRisk cascade;
  std::vector<double> default_prob;
  // NaN when the network has no lending at all.
  double avg_debtrank = 0.0;
  std::vector<double> debtrank;
  RoiReport roi;
};

struct ScenarioParams {
  CalibrationParams calibration;
  RoiRates rates;
  double p_exo = 0.001;
  unsigned threads = 1;
};

ScenarioResult evaluate_scenario(const FinancialNetwork& net, const ScenarioParams& params);

enum class SweepParameter { Eta, Alpha };

std::string to_string(SweepParameter p);

inline const std::vector<double>& default_eta_grid() {
  static const std::vector<double> grid{0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05};
  return grid;
}

inline const std::vector<double>& default_alpha_grid() {
  static const std::vector<double> grid{0.0, 0.001, 0.01, 0.05, 0.1, 0.5, 1.0};
  return grid;
}

struct SweepSpec {
  SweepParameter varying = SweepParameter::Eta;
  std::vector<double> grid;
  double fixed = 0.0;  // alpha when sweeping eta, eta when sweeping alpha
  double beta = 10.0;
  RoiRates rates;
  double p_exo = 0.001;
  unsigned threads = 1;

  // Throws ParameterError for an empty, non-increasing or out-of-range grid.
  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  double cascade_risk = 0.0;
  double avg_debtrank = 0.0;
  double market_roi_ra_weighted = 0.0;
  double market_roi_ra_unweighted = 0.0;
};

// One row per grid value, in grid order.
std::vector<SweepRow> sweep(const FinancialNetwork& net, const SweepSpec& spec);

void write_sweep_csv(std::ostream& out, SweepParameter varying, const std::vector<SweepRow>& rows);

struct IsoCurveSpec {
  double eta0 = 0.01;
  std::vector<double> eta_increases;  // relative increases (eta - eta0) / eta0
  double beta = 10.0;
  double bracket_width = 1e-4;
  unsigned threads = 1;

  void validate() const;
};

struct IsoPoint {
  double eta_rel_increase = 0.0;
  // p^C(eta0, alpha_hi) <= target; alpha_lo is the largest probed alpha that
  // misses the target (equal to alpha_hi when no search was needed).
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double target_pc = 0.0;
  double achieved_pc = 0.0;
  bool saturated = false;  // even alpha = 1 misses the target
};

// For each relative increase x, the target is p^C at (eta0 (1 + x), alpha 0)
// and alpha is searched by bisection on [0, 1] at eta0. p^C is a step function
// of alpha, so the answer is a bracket of width <= bracket_width.
std::vector<IsoPoint> iso_curve(const FinancialNetwork& net, const IsoCurveSpec& spec);

void write_iso_csv(std::ostream& out, const std::vector<IsoPoint>& points);

struct SyntheticSpec {
  std::size_t n_nodes = 120;
  double density = 8.0;        // expected edges per node
  double heterogeneity = 2.3;  // power-law exponent of node fitness
  double core_fraction = 0.2;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

// Heavy-tailed directed loan network with a dense core. Every core pair is
// linked in at least one direction, the remaining edges follow a fitness
// product (Chung-Lu) rule, and no node is left isolated. Loan amounts are the
// product of lender and borrower fitness times uniform noise. Nodes are
// numbered by decreasing fitness, so the core is the first
// round(core_fraction N) of them. Deterministic for a given spec.
FinancialNetwork generate_synthetic(const SyntheticSpec& spec);

// Parses "n=120,density=8,heterogeneity=2.3,core=0.2,seed=7" (any subset,
// optionally prefixed with "synth:") on top of `base`.
SyntheticSpec parse_synthetic_spec(const std::string& text, SyntheticSpec base = {});

}  // namespace cascaderisk
