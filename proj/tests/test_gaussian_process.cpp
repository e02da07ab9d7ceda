#include <cmath>
#include <vector>

#include "doctest.h"
#include "maldens/error.hpp"
#include "maldens/gaussian_process.hpp"
#include "maldens/parallel.hpp"

using namespace maldens;

TEST_CASE("fbm_covariance") {
  CHECK(fbm_covariance(0.7, 0.7, 0.75) == doctest::Approx(std::pow(0.7, 1.5)));
  CHECK(fbm_covariance(0.3, 0.8, 0.5) == doctest::Approx(0.3));
  CHECK(fbm_covariance(1.0, 2.0, 0.75) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(fbm_covariance(1, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(fbm_covariance(1, 1, 0.0), InvalidArgument);
  for (double s = 0; s <= 2.0; s += 0.13)
    for (double t = 0; t <= 2.0; t += 0.17) {
      CHECK(fbm_covariance(s, t, 0.3) == fbm_covariance(t, s, 0.3));
      CHECK(fbm_covariance(s, t, 0.8) >= 0.0);
    }
}

TEST_CASE("cholesky reports the failing leading minor") {
  Matrix a(3, 3);
  a(0, 0) = 1;
  a(1, 1) = 1;
  a(2, 2) = -5;
  try {
    cholesky_with_jitter(a);
    FAIL("expected failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("order 3") != std::string::npos);
  }
  // Rank-deficient PSD matrix succeeds with jitter.
  Matrix b(2, 2, 1.0);
  auto r = cholesky_with_jitter(b);
  CHECK(r.jitter > 0.0);
}

TEST_CASE("sample_paths") {
  auto grid = uniform_grid(1.0, 11);
  CHECK(sample_paths(CovarianceModel::brownian(), grid, 0, 1).n_paths() == 0);

  auto bm = sample_paths(CovarianceModel::brownian(), grid, 10000, 42);
  double v = 0;
  for (std::size_t i = 0; i < bm.n_paths(); ++i) {
    CHECK(bm.paths(i, 0) == 0.0);
    v += bm.paths(i, 10) * bm.paths(i, 10);
  }
  v /= bm.n_paths();
  CHECK(v > 0.94);
  CHECK(v < 1.06);

  auto fb = sample_paths(CovarianceModel::fbm(0.75), grid, 10000, 43);
  double vf = 0;
  for (std::size_t i = 0; i < fb.n_paths(); ++i) vf += fb.paths(i, 10) * fb.paths(i, 10);
  vf /= fb.n_paths();
  CHECK(std::abs(vf - 1.0) < 0.06);
}

TEST_CASE("sample_paths is independent of the thread count") {
  auto grid = uniform_grid(1.0, 33);
  set_default_threads(1);
  auto a = sample_paths(CovarianceModel::fbm(0.7), grid, 257, 9, true);
  set_default_threads(8);
  auto b = sample_paths(CovarianceModel::fbm(0.7), grid, 257, 9, true);
  set_default_threads(1);
  CHECK(a.paths == b.paths);
  CHECK(*a.driver_increments == *b.driver_increments);
}

TEST_CASE("stored factor reproduces paths exactly") {
  auto grid = uniform_grid(2.0, 9);
  PathSampler s(CovarianceModel::fbm(0.6), grid);
  CHECK(s.pinned_origin());
  std::vector<double> z(s.dimension()), x(grid.size()), y(grid.size());
  s.sample(5, 17, x, z);
  s.apply(z, y);
  CHECK(x == y);
}

TEST_CASE("Brownian empirical covariance matches min(s, t)") {
  auto grid = uniform_grid(1.0, 6);
  const std::size_t n = 100000;
  auto ps = sample_paths(CovarianceModel::brownian(), grid, n, 7);
  double worst = 0;
  for (std::size_t a = 1; a < grid.size(); ++a)
    for (std::size_t b = a; b < grid.size(); ++b) {
      double m = 0, m2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double p = ps.paths(i, a) * ps.paths(i, b);
        m += p;
        m2 += p * p;
      }
      m /= n;
      const double se = std::sqrt((m2 / n - m * m) / n);
      worst = std::max(worst, std::abs(m - std::min(grid[a], grid[b])) / se);
    }
  CHECK(worst < 5.0);
}

TEST_CASE("sigma_T_squared") {
  auto bm = sigma_T_squared(CovarianceModel::brownian(), uniform_grid(1.0, 201));
  CHECK(std::abs(bm.sigma2 - 1.0 / 3.0) < 1e-3);
  CHECK(bm.min_r == 0.0);
  CHECK(sigma_T_squared(CovarianceModel::brownian(), uniform_grid(1e-9, 2)).sigma2 < 1e-18);

  const double coarse = sigma_T_squared(CovarianceModel::fbm(0.75), uniform_grid(1.0, 101)).sigma2;
  const double fine = sigma_T_squared(CovarianceModel::fbm(0.75), uniform_grid(1.0, 1001)).sigma2;
  CHECK(std::abs(coarse - fine) < 1e-3);
  // Closed form T^{2H+2} / (2H + 2) for fBm.
  CHECK(fine == doctest::Approx(1.0 / 3.5).epsilon(1e-4));
}
