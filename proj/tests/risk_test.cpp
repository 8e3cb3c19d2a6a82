#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "cascaderisk/error.hpp"
#include "cascaderisk/risk.hpp"
#include "t3.hpp"

using namespace cascaderisk;
using Catch::Matchers::WithinAbs;
using testing_support::t3;

namespace {

CascadeEnsemble t3_ensemble(double alpha) {
  return run_ensemble(calibrate(t3(), {10.0, 0.05, alpha}), FundPolicy::rescue());
}

FinancialNetwork random_network(std::mt19937_64& rng, std::size_t n, double p) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> ids;
  std::vector<Loan> loans;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j)
      if (i != j && unit(rng) < p) loans.push_back({i, j, 1.0 + 99.0 * unit(rng)});
  return {ids, loans};
}

}  // namespace

TEST_CASE("T3 conditional defaults and cascade risk", "[risk]") {
  const auto q = conditional_default_matrix(t3_ensemble(0.0));
  CHECK(q.q(1, 0));
  CHECK(q.q(2, 0));
  CHECK(q.q(2, 1));
  CHECK_FALSE(q.q(0, 1));
  CHECK_FALSE(q.q(0, 0));
  CHECK(std::vector<std::size_t>(q.delta().begin(), q.delta().end()) == std::vector<std::size_t>{0, 1, 2});
  CHECK(q.total_defaults() == 3);

  const auto cr = cascade_risk(q.delta(), 3);
  CHECK(cr.node == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(cr.system == 0.5);
}

TEST_CASE("full fund removes every conditional default on T3", "[risk]") {
  const auto q = conditional_default_matrix(t3_ensemble(1.0));
  CHECK(q.total_defaults() == 0);
  CHECK(cascade_risk(q.delta(), 3).system == 0.0);
}

TEST_CASE("edgeless network has zero cascade risk", "[risk]") {
  const FinancialNetwork net({"a", "b", "c"}, {});
  const auto q = conditional_default_matrix(run_ensemble(calibrate(net, {}), FundPolicy::rescue()));
  const auto cr = cascade_risk(q.delta(), 3);
  CHECK(cr.system == 0.0);
  CHECK(cr.node == std::vector<double>(3, 0.0));
}

TEST_CASE("a node hit by every other seed has cascade risk one", "[risk]") {
  const std::vector<std::size_t> delta{3, 0, 1, 2};
  const auto cr = cascade_risk(delta, 4);
  CHECK(cr.node[0] == 1.0);
  CHECK(cr.system == 0.5);
  CHECK_THROWS_AS(cascade_risk(delta, 1), ParameterError);
}

TEST_CASE("uniform default probabilities", "[risk]") {
  const std::vector<std::size_t> delta{0, 1, 2};
  const auto p = default_probabilities(delta, 0.001);
  CHECK_THAT(p[0], WithinAbs(0.001, 1e-15));
  CHECK_THAT(p[1], WithinAbs(0.002, 1e-15));
  CHECK_THAT(p[2], WithinAbs(0.003, 1e-15));
  CHECK_THROWS_AS(default_probabilities(delta, -0.1), ParameterError);
}

TEST_CASE("probability above one names the node", "[risk]") {
  const std::vector<std::size_t> delta{0, 1, 2};
  const std::vector<std::string> ids{"1", "2", "3"};
  try {
    default_probabilities(delta, 0.4, ids);
    FAIL("expected ParameterError");
  } catch (const ParameterError& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("'3'"));
  }
  CHECK_NOTHROW(default_probabilities(delta, 1.0 / 3.0, ids));
}

TEST_CASE("heterogeneous exogenous probabilities", "[risk]") {
  const auto q = conditional_default_matrix(t3_ensemble(0.0));
  const std::vector<double> p_exo{0.002, 0.001, 0.001};
  const auto pc = cascade_risk_general(q, p_exo);
  CHECK(pc[0] == 0.0);
  CHECK_THAT(pc[1], WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(pc[2], WithinAbs(1.0, 1e-15));

  const auto ps = systemic_default_probabilities(q, p_exo);
  CHECK(ps[0] == 0.0);
  CHECK_THAT(ps[1], WithinAbs(0.002, 1e-15));
  CHECK_THAT(ps[2], WithinAbs(0.003, 1e-15));

  const auto p = default_probabilities(q, p_exo);
  CHECK_THAT(p[0], WithinAbs(0.002, 1e-15));
  CHECK_THAT(p[1], WithinAbs(0.003, 1e-15));
  CHECK_THAT(p[2], WithinAbs(0.004, 1e-15));
  CHECK_THROWS_AS(cascade_risk_general(q, std::vector<double>{0.1, 0.1}), ParameterError);
}

TEST_CASE("general cascade risk reduces to the uniform form", "[risk][property]") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = random_network(rng, 12, 0.2);
    const auto q = conditional_default_matrix(run_ensemble(calibrate(net, {10.0, 0.01, 0.0}), FundPolicy::rescue()));
    const auto uniform = cascade_risk(q.delta(), q.size()).node;
    for (const double p : {1e-4, 0.001, 0.3}) {
      CHECK(cascade_risk_general(q, std::vector<double>(q.size(), p)) == uniform);
    }
  }
}

TEST_CASE("general cascade risk is invariant to scaling the exogenous vector", "[risk][property]") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = random_network(rng, 10, 0.25);
    const auto q = conditional_default_matrix(run_ensemble(calibrate(net, {10.0, 0.01, 0.0}), FundPolicy::rescue()));
    std::vector<double> p(q.size());
    for (auto& x : p) x = 1e-4 + 1e-3 * unit(rng);
    const auto base = cascade_risk_general(q, p);
    for (const double c : {0.25, 7.0}) {
      std::vector<double> scaled = p;
      for (auto& x : scaled) x *= c;
      const auto other = cascade_risk_general(q, scaled);
      for (std::size_t i = 0; i < base.size(); ++i) CHECK_THAT(other[i], WithinAbs(base[i], 1e-12));
    }
  }
}

TEST_CASE("T3 DebtRank", "[risk][debtrank]") {
  const auto cal = calibrate(t3(), {10.0, 0.05, 0.0});
  const auto dr = debtrank_metric(t3_ensemble(0.0), cal.strengths());
  CHECK_THAT(dr.per_seed[0], WithinAbs(1.0, 1e-12));
  CHECK_THAT(dr.per_seed[1], WithinAbs(6.0 / 14.0, 1e-12));
  CHECK_THAT(dr.per_seed[2], WithinAbs(0.0, 1e-12));
  CHECK_THAT(dr.average, WithinAbs(10.0 / 21.0, 1e-12));

  const auto dr1 = debtrank_metric(t3_ensemble(1.0), cal.strengths());
  CHECK_THAT(dr1.per_seed[0], WithinAbs(0.25 * 8.0 / 14.0 + 0.5 * 6.0 / 14.0, 1e-12));
}

TEST_CASE("DebtRank with an explicit value vector", "[risk][debtrank]") {
  const std::vector<double> v{1.0, 1.0, 2.0};
  const auto dr = debtrank_metric(t3_ensemble(0.0), v);
  CHECK_THAT(dr.per_seed[0], WithinAbs(0.75, 1e-12));
  CHECK_THAT(dr.per_seed[1], WithinAbs(0.5, 1e-12));
  CHECK_THAT(dr.per_seed[2], WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(debtrank_metric(t3_ensemble(0.0), std::vector<double>{0.0, 0.0, 0.0}), InputError);
  CHECK_THROWS_AS(debtrank_metric(t3_ensemble(0.0), std::vector<double>{1.0, 1.0}), ParameterError);
}

TEST_CASE("DebtRank needs some lending", "[risk][debtrank]") {
  const FinancialNetwork net({"a", "b"}, {});
  const auto cal = calibrate(net, {});
  CHECK_THROWS_AS(debtrank_metric(run_ensemble(cal, FundPolicy::rescue()), cal.strengths()), InputError);
}

TEST_CASE("DebtRank stays in the unit interval", "[risk][debtrank][property]") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const auto net = random_network(rng, 9, 0.35);
    const auto cal = calibrate(net, {10.0, 0.005, 0.2});
    const auto dr = debtrank_metric(run_ensemble(cal, FundPolicy::rescue()), cal.strengths());
    for (const double x : dr.per_seed) {
      CHECK(x >= -1e-12);
      CHECK(x <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("ensemble shape is checked", "[risk]") {
  auto ens = t3_ensemble(0.0);
  auto missing = ens;
  missing.outcomes.pop_back();
  CHECK_THROWS_AS(conditional_default_matrix(missing), InputError);
  auto swapped = ens;
  std::swap(swapped.outcomes[0], swapped.outcomes[1]);
  CHECK_THROWS_AS(conditional_default_matrix(swapped), InputError);
}

TEST_CASE("system cascade risk matches non-seed default counts", "[risk][property]") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = random_network(rng, 11, 0.2);
    const auto ens = run_ensemble(calibrate(net, {10.0, 0.01, 0.0}), FundPolicy::rescue());
    std::size_t hits = 0;
    for (const auto& o : ens.outcomes) hits += o.defaulted.size() - 1;
    const auto q = conditional_default_matrix(ens);
    CHECK(q.total_defaults() == hits);
    const double n = static_cast<double>(net.size());
    CHECK_THAT(cascade_risk(q.delta(), net.size()).system, WithinAbs(hits / (n * (n - 1)), 1e-15));
  }
}

TEST_CASE("cascade risk falls as the fund grows", "[risk][property]") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = random_network(rng, 10, 0.3);
    double prev = 2.0;
    for (const double alpha : {0.0, 0.01, 0.1, 0.5, 1.0}) {
      const auto q = conditional_default_matrix(
          run_ensemble(calibrate(net, {10.0, 0.01, alpha}), FundPolicy::rescue()));
      const double pc = cascade_risk(q.delta(), net.size()).system;
      CHECK(pc <= prev);
      prev = pc;
    }
  }
}

TEST_CASE("risk report and CSV", "[risk]") {
  const auto cal = calibrate(t3(), {10.0, 0.05, 0.0});
  const auto report = risk_report(run_ensemble(cal, FundPolicy::rescue()), cal.strengths(), 0.001);
  CHECK(report.delta == std::vector<std::size_t>{0, 1, 2});
  std::ostringstream csv;
  write_risk_csv(csv, report);
  const std::string text = csv.str();
  CHECK(text.starts_with("node,delta,cascade_risk,default_prob,debtrank\n1,0,0,0.001,1\n"));
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("\nsystem,3,0.5,"));
}
