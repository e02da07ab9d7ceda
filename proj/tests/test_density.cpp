#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "maldens/density.hpp"
#include "maldens/error.hpp"
#include "maldens/rng.hpp"

using namespace maldens;

namespace {

double gauss(double x, double s2) {
  return std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * std::numbers::pi * s2);
}

std::vector<double> symmetric_grid(double half, std::size_t n) {
  std::vector<double> v(2 * n + 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = half * (static_cast<double>(i) - static_cast<double>(n)) / static_cast<double>(n);
  return v;
}

FunctionalSamples gaussian_samples(std::size_t n, double sigma, std::uint64_t seed) {
  FunctionalSamples s;
  s.F.resize(n);
  NormalStream(seed, 0).fill_normal(s.F, sigma);
  s.G.assign(n, sigma * sigma);
  s.h.assign(n, 0.0);
  return s;
}

}  // namespace

TEST_CASE("Nourdin-Viens formula") {
  const auto grid = symmetric_grid(4.0, 80);

  SUBCASE("constant G with exact E|F| is the Gaussian density") {
    const double sigma = 1.3;
    const auto s = gaussian_samples(200, sigma, 1);
    const auto d = density_nourdin_viens(s, grid, 0.3, {}, sigma * std::sqrt(2.0 / std::numbers::pi));
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(d.values[i] == doctest::Approx(gauss(grid[i], sigma * sigma)).epsilon(1e-13));
    CHECK(d.method == "nourdin_viens");
  }

  SUBCASE("agrees with the new representation for constant G") {
    const auto s = gaussian_samples(3000, 0.8, 2);
    auto nv = density_nourdin_viens(s, grid, 0.2);
    for (double& v : nv.values) v /= nv.mass;
    const auto nr = density_new_representation(s, grid, 0.2);
    CHECK(nr.mass == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nr.method == "new_repr");
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(nv.values[i] - nr.values[i]) < 1e-10);
  }

  SUBCASE("errors") {
    FunctionalSamples empty;
    CHECK_THROWS_AS(density_nourdin_viens(empty, grid, 0.3), DegenerateData);
    auto s = gaussian_samples(50, 1.0, 3);
    CHECK_THROWS_AS(density_nourdin_viens(s, std::vector<double>{0.5, 1.0}, 0.3), InvalidArgument);
    s.G[7] = 0.0;
    CHECK_THROWS_AS(density_nourdin_viens(s, grid, 0.3), ModelViolation);
    s.G[7] = 1.0;
    s.h.clear();
    CHECK_THROWS_AS(density_new_representation(s, grid, 0.3), InvalidArgument);
  }

  SUBCASE("non-positive conditional G is a regression failure") {
    auto s = gaussian_samples(500, 1.0, 4);
    for (std::size_t i = 0; i < s.F.size(); ++i) s.G[i] = s.F[i] > 0.0 ? -1.0 : 1.0;
    ReconstructionInfo info;
    CHECK_THROWS_AS(density_nourdin_viens(s, grid, 0.2, {}, std::nullopt, &info), RegressionFailure);
    // A few clamped points (at most 1%) are tolerated and counted.
    std::fill(s.G.begin(), s.G.end(), 1.0);
    s.F[0] = 10.0;
    s.G[0] = -1.0;
    std::vector<double> far(grid);
    far.push_back(10.0);
    const auto d = density_nourdin_viens(s, far, 0.01, {}, std::nullopt, &info);
    CHECK(info.clamped == 1);
    CHECK(d.values.back() >= 0.0);
    CHECK(std::isfinite(d.mass));
  }
}

TEST_CASE("indicator estimator") {
  const auto s = gaussian_samples(100000, 1.0, 5);
  const auto delta = s.delta();
  const double fmax = *std::max_element(s.F.begin(), s.F.end());
  CHECK(indicator_density(s.F, delta, fmax + 1.0).value == 0.0);
  CHECK(indicator_density(s.F, delta, fmax).value == 0.0);

  const auto all = indicator_density(s.F, delta, -1e300);
  CHECK(std::abs(all.value) < 3.0 * all.se);

  for (double x : {-1.0, 0.0, 1.0}) {
    const auto v = indicator_density(s.F, delta, x);
    CAPTURE(x);
    CHECK(std::abs(v.value - gauss(x, 1.0)) < 3.0 * v.se);
  }
  CHECK_THROWS_AS(indicator_density(s.F, std::vector<double>(3), 0.0), InvalidArgument);
}

TEST_CASE("Gaussian envelopes") {
  const auto grid = symmetric_grid(3.0, 30);
  const double rho0 = gauss(0.0, 1.0);

  SUBCASE("value at zero is rho0") {
    for (int variant = 0; variant < 4; ++variant) {
      BoundCertificate c;
      c.sigma_min_sq = 0.7;
      c.rho0 = 0.31;
      if (variant == 0) c.m1 = 0.0;
      if (variant == 1) c.m2 = 0.4;
      if (variant == 2) c.M_h = 2.0;
      if (variant == 3) {
        c.m1 = -0.2;
        c.m2 = 0.3;
        c.sigma_max_sq = 1.2;
      }
      const auto e = gaussian_envelopes(c, grid);
      CHECK(e.lower[30] == 0.31);
      if (variant == 3) CHECK(e.upper[30] == 0.31);
    }
  }

  SUBCASE("Gaussian self-bound") {
    BoundCertificate c;
    c.sigma_min_sq = 1.0;
    c.M_h = 0.0;
    c.rho0 = rho0;
    const auto e = gaussian_envelopes(c, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(e.lower[i] == doctest::Approx(gauss(grid[i], 1.0)).epsilon(1e-15));
    CHECK_FALSE(e.has_upper);
    CHECK(std::isinf(e.upper[0]));
  }

  SUBCASE("one-sided bounds") {
    BoundCertificate c;
    c.sigma_min_sq = 0.5;
    c.m1 = 0.0;
    c.rho0 = 0.4;
    const auto e = gaussian_envelopes(c, grid);
    for (std::size_t i = 0; i <= 30; ++i) CHECK(e.lower[i] == doctest::Approx(0.4 * std::exp(-grid[i] * grid[i])).epsilon(1e-15));
    for (std::size_t i = 31; i < grid.size(); ++i) CHECK(e.lower[i] == 0.0);
    c.m1.reset();
    c.m2 = 0.5;
    const auto f = gaussian_envelopes(c, grid);
    CHECK(f.lower[0] == 0.0);
    CHECK(f.lower[40] == doctest::Approx(0.4 * std::exp(-1.0 - 0.5)).epsilon(1e-15));
  }

  SUBCASE("sde certificate") {
    const double mh = 4.0 * std::exp(2.0);
    BoundCertificate c;
    c.sigma_min_sq = 1.0;  // c^2 e^{0} t^{2H} at t = 1
    c.M_h = mh;
    c.rho0 = 0.25;
    const std::vector<double> x{-1.0, 0.0, 1.0};
    const auto e = gaussian_envelopes(c, x);
    CHECK(e.lower[2] == doctest::Approx(0.25 * std::exp(-0.5 - mh)).epsilon(1e-14));
    CHECK(e.lower[0] == e.lower[2]);
  }

  SUBCASE("monotone in sigma_min") {
    NormalStream s(8, 0);
    for (int trial = 0; trial < 50; ++trial) {
      BoundCertificate a;
      a.sigma_min_sq = 0.1 + s.uniform();
      a.rho0 = 0.1 + s.uniform();
      a.m1 = s.normal();
      a.m2 = s.normal();
      BoundCertificate b = a;
      b.sigma_min_sq = a.sigma_min_sq * (1.0 + s.uniform());
      const auto ea = gaussian_envelopes(a, grid), eb = gaussian_envelopes(b, grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] != 0.0) CHECK(eb.lower[i] > ea.lower[i]);
    }
  }

  SUBCASE("errors") {
    BoundCertificate c;
    c.sigma_min_sq = 1.0;
    c.rho0 = 0.3;
    CHECK_THROWS_AS(gaussian_envelopes(c, grid), InvalidArgument);
    c.m1 = 0.0;
    c.rho0 = 0.0;
    CHECK_THROWS_AS(gaussian_envelopes(c, grid), InvalidArgument);
    c.rho0 = 0.3;
    c.sigma_max_sq = 0.5;
    CHECK_THROWS_AS(gaussian_envelopes(c, grid), InvalidArgument);
  }
}

TEST_CASE("sandwich envelopes") {
  const auto grid = symmetric_grid(3.0, 30);
  const double s2 = 1.7, eabs = std::sqrt(s2 * 2.0 / std::numbers::pi);
  const auto e = sandwich_envelopes(s2, s2, eabs, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(e.lower[i] == doctest::Approx(gauss(grid[i], s2)).epsilon(1e-14));
    CHECK(e.upper[i] == e.lower[i]);
  }
  const auto f = sandwich_envelopes(0.6, 2.0, 0.9, grid);
  CHECK(f.lower[30] == doctest::Approx(0.9 / 4.0).epsilon(1e-15));
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(f.lower[i] <= f.upper[i]);
  CHECK_THROWS_AS(sandwich_envelopes(2.0, 1.0, 0.9, grid), InvalidArgument);
  CHECK_THROWS_AS(sandwich_envelopes(1.0, 1.0, 0.0, grid), InvalidArgument);
}

TEST_CASE("envelope check") {
  const auto grid = symmetric_grid(3.0, 30);
  std::vector<double> lower(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) lower[i] = gauss(grid[i], 1.0);
  CHECK(check_envelope(grid, lower, lower, {}, 0.0).pass());

  std::vector<double> half(lower);
  for (double& v : half) v *= 0.5;
  const auto r = check_envelope(grid, half, lower, {}, 0.1);
  CHECK(r.items.size() == grid.size());
  CHECK(r.items[3].index == 3);
  CHECK(r.items[3].side == "lower");

  std::vector<double> upper(lower);
  const auto u = check_envelope(grid, lower, half, upper, 0.0);
  CHECK(u.pass());
  const auto v = check_envelope(grid, lower, half, half, 0.5);
  CHECK(v.items.size() == grid.size());

  std::vector<double> x(100000);
  NormalStream(9, 0).fill_normal(x);
  const auto kde = kde_density(x, grid, silverman_bandwidth(x));
  CHECK(check_envelope(grid, kde.values, lower, {}, 0.1).pass());

  CHECK_THROWS_AS(check_envelope(grid, std::vector<double>(2), lower, {}, 0.1), InvalidArgument);
}
