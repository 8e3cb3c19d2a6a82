#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "cascaderisk/error.hpp"
#include "cascaderisk/experiments.hpp"
#include "cascaderisk/format.hpp"

namespace cascaderisk {

namespace {

// std distributions are implementation-defined; mt19937_64 output is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  // Discrete power law on {1, 2, ..., cap}: floor of a Pareto(exponent - 1) draw.
  double power_law(double exponent, double cap) {
    const double u = 1.0 - uniform();  // (0, 1]
    return std::min(cap, std::floor(std::pow(u, -1.0 / (exponent - 1.0))));
  }

 private:
  std::mt19937_64 engine_;
};

constexpr double kCoreReverseProbability = 0.5;

std::uint64_t parse_count(const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError("not a nonnegative integer: '" + text + "'");
  return v;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_nodes < 2) throw ParameterError("synthetic network needs at least 2 nodes");
  if (!(density > 0.0)) throw ParameterError("synthetic density must be > 0");
  if (density > static_cast<double>(n_nodes - 1)) {
    throw ParameterError("synthetic density " + format_double(density) + " infeasible for N=" +
                         std::to_string(n_nodes) + " (at most N-1 edges per node)");
  }
  if (!(heterogeneity > 1.0)) throw ParameterError("heterogeneity exponent must be > 1");
  if (!(core_fraction >= 0.0 && core_fraction <= 1.0)) throw ParameterError("core fraction must lie in [0, 1]");
  const auto core = static_cast<std::size_t>(std::round(core_fraction * static_cast<double>(n_nodes)));
  const double core_pairs = 0.5 * static_cast<double>(core) * static_cast<double>(core > 0 ? core - 1 : 0);
  if (core_pairs > density * static_cast<double>(n_nodes)) {
    throw ParameterError("synthetic density too low to link every core pair");
  }
}

FinancialNetwork generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_nodes;
  Rng rng(spec.rng_seed);

  // Lending and borrowing propensities, correlated through a shared draw.
  std::vector<double> out_fit(n);
  std::vector<double> in_fit(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.power_law(spec.heterogeneity, static_cast<double>(n));
    out_fit[i] = x * rng.uniform(0.5, 2.0);
    in_fit[i] = x * rng.uniform(0.5, 2.0);
  }

  std::vector<std::size_t> by_size(n);
  std::iota(by_size.begin(), by_size.end(), std::size_t{0});
  std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    return out_fit[a] + in_fit[a] > out_fit[b] + in_fit[b];
  });
  const auto core_size = static_cast<std::size_t>(std::round(spec.core_fraction * static_cast<double>(n)));
  std::vector<bool> in_core(n, false);
  for (std::size_t k = 0; k < core_size; ++k) in_core[by_size[k]] = true;

  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  std::size_t edges = 0;
  const auto link = [&](std::size_t i, std::size_t j) {
    if (i != j && !adj[i][j]) {
      adj[i][j] = true;
      ++edges;
    }
  };

  for (std::size_t a = 0; a < n; ++a) {
    if (!in_core[a]) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!in_core[b]) continue;
      const double forward = out_fit[a] * in_fit[b];
      const double backward = out_fit[b] * in_fit[a];
      const bool a_lends = rng.bernoulli(forward / (forward + backward));
      if (a_lends) link(a, b); else link(b, a);
      if (rng.bernoulli(kCoreReverseProbability)) {
        if (a_lends) link(b, a); else link(a, b);
      }
    }
  }

  // Chung-Lu placement of the remaining budget over pairs outside the core
  // block; the scale c is found by bisection on the expected edge count.
  const double budget = spec.density * static_cast<double>(n) - static_cast<double>(edges);
  if (budget > 0.0) {
    const auto expected = [&](double c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && !(in_core[i] && in_core[j])) total += std::min(1.0, c * out_fit[i] * in_fit[j]);
      return total;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (expected(hi) < budget && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (expected(mid) < budget ? lo : hi) = mid;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && !(in_core[i] && in_core[j]) && rng.bernoulli(std::min(1.0, hi * out_fit[i] * in_fit[j])))
          link(i, j);
  }

  // Attach isolated nodes to a core (or the largest) node.
  const std::size_t anchor_pool = std::max<std::size_t>(core_size, 1);
  for (std::size_t i = 0; i < n; ++i) {
    bool touched = false;
    for (std::size_t j = 0; j < n && !touched; ++j) touched = adj[i][j] || adj[j][i];
    if (touched) continue;
    std::size_t anchor = by_size[static_cast<std::size_t>(rng.uniform() * static_cast<double>(anchor_pool))];
    if (anchor == i) anchor = by_size[0] != i ? by_size[0] : by_size[1];
    if (rng.bernoulli(0.5)) link(i, anchor); else link(anchor, i);
  }

  // Renumber by decreasing size so the core occupies the leading ids.
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[by_size[k]] = k;
  std::vector<std::string> ids(n);
  const int width = static_cast<int>(std::to_string(n).size());
  for (std::size_t k = 0; k < n; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "B%0*zu", width, k + 1);
    ids[k] = buf;
  }

  std::vector<Loan> loans;
  loans.reserve(edges);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) loans.push_back({rank[i], rank[j], out_fit[i] * in_fit[j] * rng.uniform(0.5, 1.5)});
  return {std::move(ids), std::move(loans)};
}

SyntheticSpec parse_synthetic_spec(const std::string& text, SyntheticSpec base) {
  std::string body = text;
  if (body.starts_with("synth:")) body = body.substr(6);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParameterError("synthetic spec item '" + item + "' is not key=value");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    try {
      if (key == "n") {
        base.n_nodes = parse_count(value);
      } else if (key == "density") {
        base.density = parse_double(value, key);
      } else if (key == "heterogeneity") {
        base.heterogeneity = parse_double(value, key);
      } else if (key == "core") {
        base.core_fraction = parse_double(value, key);
      } else if (key == "seed") {
        base.rng_seed = parse_count(value);
      } else {
        throw ParameterError("unknown synthetic spec key '" + key + "'");
      }
    } catch (const InputError&) {
      throw ParameterError("bad value for synthetic spec key '" + key + "': '" + value + "'");
    }
  }
  return base;
}

}  // namespace cascaderisk
