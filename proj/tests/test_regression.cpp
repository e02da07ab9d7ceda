#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "maldens/error.hpp"
#include "maldens/regression.hpp"
#include "maldens/rng.hpp"

using namespace maldens;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  NormalStream(seed, 0).fill_normal(v);
  return v;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

TEST_CASE("quantiles") {
  const std::vector<double> v{5.0, 1.0, 4.0, 2.0, 3.0};
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 0.2) == 1.0);
  CHECK(empirical_quantile(v, 0.5) == 3.0);
  CHECK(empirical_quantile(v, 1.0) == 5.0);
  CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5), DegenerateData);
}

TEST_CASE("Silverman bandwidth") {
  const std::vector<double> two{0.0, 1.0};
  // sd = sqrt(0.5), IQR / 1.34 = 0.7463.
  CHECK(silverman_bandwidth(two) == doctest::Approx(1.06 * std::sqrt(0.5) * std::pow(2.0, -0.2)).epsilon(1e-15));
  CHECK(std::abs(silverman_bandwidth(two) - 0.6525) < 1e-4);

  std::vector<double> x = normals(1000, 1), kx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) kx[i] = 3.5 * x[i];
  CHECK(silverman_bandwidth(kx) == doctest::Approx(3.5 * silverman_bandwidth(x)).epsilon(1e-14));

  CHECK_THROWS_AS(silverman_bandwidth(std::vector<double>(10, 2.0)), DegenerateData);
  CHECK_THROWS_AS(silverman_bandwidth(std::vector<double>{1.0}), DegenerateData);
  // Zero IQR with positive spread falls back to sd.
  std::vector<double> spike(100, 0.0);
  spike[0] = 10.0;
  CHECK(silverman_bandwidth(spike) > 0.0);
}

TEST_CASE("Nadaraya-Watson") {
  const std::vector<double> grid = linspace(-1.0, 1.0, 41);

  SUBCASE("constant response") {
    const std::vector<double> f = normals(500, 2), z(500, 2.75);
    const auto est = nadaraya_watson(f, z, grid, 0.3);
    for (double v : est.values) CHECK(v == doctest::Approx(2.75).epsilon(1e-14));
  }

  SUBCASE("single pair") {
    const std::vector<double> f{0.0}, z{5.0};
    const auto est = nadaraya_watson(f, z, linspace(-40.0, 40.0, 9), 0.5);
    for (double v : est.values) CHECK(v == 5.0);
    // One sample never reaches the effective-count threshold.
    CHECK(est.flagged_count() == 9);
  }

  SUBCASE("identity on uniform data") {
    const std::size_t n = 10000;
    std::vector<double> f(n);
    NormalStream s(3, 0);
    for (double& v : f) v = 2.0 * s.uniform() - 1.0;
    const auto est = nadaraya_watson(f, f, grid, silverman_bandwidth(f));
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (std::abs(grid[i]) <= 0.8 + 1e-12) CHECK(std::abs(est.values[i] - grid[i]) < 0.02);
  }

  SUBCASE("convex combination and the wide-bandwidth limit") {
    const std::vector<double> f = normals(2000, 4), z = normals(2000, 5);
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    const auto est = nadaraya_watson(f, z, linspace(-6.0, 6.0, 61), 0.2);
    for (double v : est.values) {
      CHECK(v >= *lo);
      CHECK(v <= *hi);
    }
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    const auto flat = nadaraya_watson(f, z, grid, 1e6 * 8.0);
    for (double v : flat.values) CHECK(std::abs(v - mean) < 1e-6);
  }

  SUBCASE("trust flags") {
    const std::vector<double> f = normals(5000, 6);
    TrustPolicy tp;
    tp.lo = empirical_quantile(f, 0.005);
    tp.hi = empirical_quantile(f, 0.995);
    const auto est = nadaraya_watson(f, f, linspace(-5.0, 5.0, 101), 0.2, tp);
    CHECK_FALSE(est.flagged[50]);
    CHECK(est.flagged[0]);
    CHECK(est.flagged[100]);
    for (std::size_t i = 0; i < 101; ++i) CHECK(est.n_effective[i] >= 1.0 - 1e-12);
  }

  SUBCASE("errors") {
    const std::vector<double> f{0.0, 1.0};
    CHECK_THROWS_AS(nadaraya_watson(f, f, grid, 0.0), InvalidArgument);
    CHECK_THROWS_AS(nadaraya_watson(f, std::vector<double>{1.0}, grid, 1.0), InvalidArgument);
  }
}

TEST_CASE("kernel density estimate") {
  const double one[] = {0.0};
  CHECK(kde_density(one, std::vector<double>{0.0}, 1.0).values[0] ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));

  const double pair[] = {-0.7, 0.7};
  const auto sym = kde_density(pair, linspace(-3.0, 3.0, 61), 0.4);
  for (std::size_t i = 0; i < 61; ++i) CHECK(sym.values[i] == doctest::Approx(sym.values[60 - i]).epsilon(1e-14));

  const std::vector<double> x = normals(100000, 7);
  const auto grid = linspace(-2.0, 2.0, 81);
  const auto est = kde_density(x, grid, silverman_bandwidth(x));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(est.values[i] - phi(grid[i])));
  CHECK(worst <= 0.01);

  const auto wide = kde_density(x, linspace(-8.0, 8.0, 321), silverman_bandwidth(x));
  CHECK(wide.mass >= 0.99);
  CHECK(wide.mass <= 1.0 + 1e-6);
  CHECK(wide.method == "kde");
}
