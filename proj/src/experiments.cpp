#include "cascaderisk/experiments.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "cascaderisk/error.hpp"
#include "cascaderisk/format.hpp"
#include "parallel.hpp"

namespace cascaderisk {

ScenarioResult evaluate_scenario(const FinancialNetwork& net, const ScenarioParams& params) {
  ScenarioResult r;
  r.calibrated = calibrate(net, params.calibration);
  r.ensemble = run_ensemble(r.calibrated, FundPolicy::rescue(), EnsembleOptions{params.threads});
  r.defaults = conditional_default_matrix(r.ensemble);
  r.cascade = cascade_risk(r.defaults.delta(), net.size());
  r.default_prob = default_probabilities(r.defaults.delta(), params.p_exo, net.node_ids());
  if (r.calibrated.strengths().total_lent() > 0.0) {
    auto dr = debtrank_metric(r.ensemble, r.calibrated.strengths());
    r.avg_debtrank = dr.average;
    r.debtrank = std::move(dr.per_seed);
  } else {
    r.avg_debtrank = std::numeric_limits<double>::quiet_NaN();
    r.debtrank.assign(net.size(), std::numeric_limits<double>::quiet_NaN());
  }
  r.roi = roi_report(r.calibrated, params.rates, r.default_prob, DegenerateNodes::Skip);
  return r;
}

std::string to_string(SweepParameter p) { return p == SweepParameter::Eta ? "eta" : "alpha"; }

void SweepSpec::validate() const {
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0 && !(grid[k] > grid[k - 1])) throw ParameterError("sweep grid must be strictly increasing");
  }
  for (const double g : grid) {
    const bool eta = varying == SweepParameter::Eta;
    CalibrationParams{beta, eta ? g : fixed, eta ? fixed : g}.validate();
  }
  rates.validate();
}

std::vector<SweepRow> sweep(const FinancialNetwork& net, const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows(spec.grid.size());
  // Grid points run concurrently; the ensemble inside each stays sequential.
  detail::parallel_for(spec.grid.size(), spec.threads, [&](std::size_t k) {
    ScenarioParams params;
    params.calibration.beta = spec.beta;
    params.calibration.eta = spec.varying == SweepParameter::Eta ? spec.grid[k] : spec.fixed;
    params.calibration.alpha = spec.varying == SweepParameter::Alpha ? spec.grid[k] : spec.fixed;
    params.rates = spec.rates;
    params.p_exo = spec.p_exo;
    const auto r = evaluate_scenario(net, params);
    rows[k] = {spec.grid[k], r.cascade.system, r.avg_debtrank, r.roi.market_weighted, r.roi.market_unweighted};
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepParameter varying, const std::vector<SweepRow>& rows) {
  out << "param_name,param_value,cascade_risk,avg_debtrank,market_roi_ra_weighted,market_roi_ra_unweighted\n";
  const auto name = to_string(varying);
  for (const auto& r : rows) {
    out << name << ',' << format_double(r.value) << ',' << format_double(r.cascade_risk) << ','
        << format_double(r.avg_debtrank) << ',' << format_double(r.market_roi_ra_weighted) << ','
        << format_double(r.market_roi_ra_unweighted) << '\n';
  }
}

void IsoCurveSpec::validate() const {
  CalibrationParams{beta, eta0, 0.0}.validate();
  if (!(eta0 > 0.0)) throw ParameterError("iso-curve base eta must be > 0");
  if (eta_increases.empty()) throw ParameterError("iso-curve increase grid is empty");
  for (std::size_t k = 0; k < eta_increases.size(); ++k) {
    if (!(eta_increases[k] >= 0.0)) throw ParameterError("iso-curve increases must be nonnegative");
    if (k > 0 && !(eta_increases[k] > eta_increases[k - 1])) {
      throw ParameterError("iso-curve increases must be strictly increasing");
    }
    CalibrationParams{beta, eta0 * (1.0 + eta_increases[k]), 0.0}.validate();
  }
  if (!(bracket_width > 0.0 && bracket_width < 1.0)) throw ParameterError("bracket width must lie in (0, 1)");
}

namespace {

double system_risk(const FinancialNetwork& net, double beta, double eta, double alpha, unsigned threads) {
  const auto cal = calibrate(net, {beta, eta, alpha});
  const auto ens = run_ensemble(cal, FundPolicy::rescue(), EnsembleOptions{threads});
  return cascade_risk(conditional_default_matrix(ens).delta(), net.size()).system;
}

}  // namespace

std::vector<IsoPoint> iso_curve(const FinancialNetwork& net, const IsoCurveSpec& spec) {
  spec.validate();

  // Bisection midpoints are dyadic and shared between grid points.
  std::map<double, double> at_base;
  const auto risk_at_alpha = [&](double alpha) {
    const auto it = at_base.find(alpha);
    if (it != at_base.end()) return it->second;
    const double pc = system_risk(net, spec.beta, spec.eta0, alpha, spec.threads);
    at_base.emplace(alpha, pc);
    return pc;
  };

  const double base = risk_at_alpha(0.0);
  if (!(base > 0.0)) throw ParameterError("iso-curve needs positive cascade risk at the base eta with alpha = 0");

  std::vector<IsoPoint> points;
  points.reserve(spec.eta_increases.size());
  for (const double x : spec.eta_increases) {
    IsoPoint pt;
    pt.eta_rel_increase = x;
    pt.target_pc = x == 0.0 ? base : system_risk(net, spec.beta, spec.eta0 * (1.0 + x), 0.0, spec.threads);
    if (base <= pt.target_pc) {
      pt.achieved_pc = base;
    } else if (const double full = risk_at_alpha(1.0); full > pt.target_pc) {
      pt.alpha_lo = pt.alpha_hi = 1.0;
      pt.achieved_pc = full;
      pt.saturated = true;
    } else {
      double lo = 0.0;
      double hi = 1.0;
      pt.achieved_pc = full;
      while (hi - lo > spec.bracket_width) {
        const double mid = 0.5 * (lo + hi);
        const double pc = risk_at_alpha(mid);
        if (pc <= pt.target_pc) {
          hi = mid;
          pt.achieved_pc = pc;
        } else {
          lo = mid;
        }
      }
      pt.alpha_lo = lo;
      pt.alpha_hi = hi;
    }
    points.push_back(pt);
  }
  return points;
}

void write_iso_csv(std::ostream& out, const std::vector<IsoPoint>& points) {
  out << "eta_rel_increase,alpha_lo,alpha_hi,target_pc,achieved_pc\n";
  for (const auto& p : points) {
    out << format_double(p.eta_rel_increase) << ',' << format_double(p.alpha_lo) << ','
        << format_double(p.alpha_hi) << ',' << format_double(p.target_pc) << ',' << format_double(p.achieved_pc)
        << '\n';
  }
}

}  // namespace cascaderisk
