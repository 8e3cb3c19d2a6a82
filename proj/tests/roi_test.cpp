#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "cascaderisk/error.hpp"
#include "cascaderisk/roi.hpp"
#include "t3.hpp"

using namespace cascaderisk;
using Catch::Matchers::WithinAbs;
using testing_support::t3;

TEST_CASE("T3 nominal ROI", "[roi]") {
  // node 2: S^L = 8, B = 80, E = 4, D = 68
  const auto n0 = nominal_roi(calibrate(t3(), {10.0, 0.05, 0.0}), {});
  CHECK_THAT(n0[0], WithinAbs((0.07 * 76 + 0.03 * 4) / 80.0, 1e-15));
  CHECK_THAT(n0[1], WithinAbs(0.065, 1e-15));
  CHECK_THAT(n0[2], WithinAbs((0.04 * 6 + 0.07 * 51 + 0.03 * 3) / 60.0, 1e-15));

  const auto n1 = nominal_roi(calibrate(t3(), {10.0, 0.05, 1.0}), {});
  CHECK_THAT(n1[1], WithinAbs(0.0645, 1e-15));
}

TEST_CASE("risk-adjusted ROI", "[roi]") {
  const std::vector<double> nominal{0.065, 0.065, 0.065};
  const std::vector<double> p{0.002, 0.0, 1.0};
  const auto ra = risk_adjusted_roi(nominal, p);
  CHECK_THAT(ra[0], WithinAbs(0.065 * 0.998 - 0.002, 1e-15));
  CHECK(ra[1] == 0.065);
  CHECK(ra[2] == -1.0);
  CHECK_THROWS_AS(risk_adjusted_roi(nominal, std::vector<double>{0.1, 1.1, 0.0}), ParameterError);
  CHECK_THROWS_AS(risk_adjusted_roi(nominal, std::vector<double>{0.1, -0.1, 0.0}), ParameterError);
  CHECK_THROWS_AS(risk_adjusted_roi(nominal, std::vector<double>{0.1}), ParameterError);
}

TEST_CASE("risk-adjusted ROI strictly decreases in p", "[roi][property]") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::vector<double> nominal{-0.5 + unit(rng)};
    const double a = unit(rng), b = unit(rng);
    if (a == b) continue;
    const auto lo = risk_adjusted_roi(nominal, std::vector<double>{std::min(a, b)});
    const auto hi = risk_adjusted_roi(nominal, std::vector<double>{std::max(a, b)});
    CHECK(hi[0] < lo[0]);
  }
}

TEST_CASE("a node with no lending and no reserve earns the external rate", "[roi]") {
  const auto roi = nominal_roi(calibrate(t3(), {10.0, 0.0, 0.0}), {});
  CHECK_THAT(roi[0], WithinAbs(0.07, 1e-15));
}

TEST_CASE("equal reserve and fund rates make ROI independent of alpha", "[roi][property]") {
  const RoiRates rates{0.04, 0.07, 0.025, 0.025};
  const auto base = nominal_roi(calibrate(t3(), {10.0, 0.05, 0.0}), rates);
  for (const double alpha : {0.001, 0.3, 0.5, 1.0}) {
    const auto other = nominal_roi(calibrate(t3(), {10.0, 0.05, alpha}), rates);
    CHECK(other == base);
  }
}

TEST_CASE("zero-balance nodes", "[roi]") {
  const FinancialNetwork net({"a", "b", "z"}, {{0, 1, 5.0}});
  const auto cal = calibrate(net, {10.0, 0.05, 0.0});
  CHECK_THROWS_AS(nominal_roi(cal, {}), InputError);
  const std::vector<double> p{0.001, 0.001, 0.001};
  CHECK_THROWS_AS(roi_report(cal, {}, p), InputError);
  const auto rep = roi_report(cal, {}, p, DegenerateNodes::Skip);
  CHECK(std::isnan(rep.nominal[2]));
  CHECK(std::isnan(rep.risk_adjusted[2]));
  CHECK_THAT(rep.market_unweighted, WithinAbs((rep.risk_adjusted[0] + rep.risk_adjusted[1]) / 2, 1e-15));
}

TEST_CASE("market aggregates", "[roi]") {
  const auto cal = calibrate(t3(), {10.0, 0.05, 0.0});
  const std::vector<double> p{0.001, 0.002, 0.003};
  const auto rep = roi_report(cal, {}, p);
  const auto& ra = rep.risk_adjusted;
  CHECK_THAT(rep.market_unweighted, WithinAbs((ra[0] + ra[1] + ra[2]) / 3.0, 1e-15));
  CHECK_THAT(rep.market_weighted, WithinAbs((80 * ra[0] + 80 * ra[1] + 60 * ra[2]) / 220.0, 1e-15));
  CHECK(rep.node_ids == std::vector<std::string>{"1", "2", "3"});
  CHECK(rep.alpha == 0.0);

  std::ostringstream csv;
  write_roi_csv(csv, rep);
  CHECK(csv.str().starts_with("node,roi_nominal,roi_risk_adjusted,default_prob\n1,0.068,"));
}

TEST_CASE("rates must be finite", "[roi]") {
  CHECK_THROWS_AS(nominal_roi(calibrate(t3(), {}), {0.04, std::nan(""), 0.03, 0.02}), ParameterError);
  CHECK_NOTHROW(RoiRates{-0.1, 0.0, 0.0, 0.0}.validate());
}
