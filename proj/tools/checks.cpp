#include "checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "maldens/experiment.hpp"
#include "maldens/volterra.hpp"

namespace maldens::checks {

std::vector<KernelRow> kernel_identity_rows() {
  std::vector<KernelRow> rows;
  for (double H : {0.6, 0.75, 0.9}) {
    const VolterraKernel k(H);
    for (double t : {0.5, 1.0}) {
      const double got = k.l2_norm_squared(t), want = std::pow(t, 2.0 * H);
      rows.push_back({H, t, got, want, std::abs(got - want) / want});
    }
  }
  return rows;
}

Outcome kernel_identity(double tol) {
  double worst = 0.0;
  for (const auto& r : kernel_identity_rows()) worst = std::max(worst, r.rel_error);
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst relative error %.3e (tol %.0e)", worst, tol);
  return {worst <= tol, buf};
}

Outcome c_h_fixture(double tol) {
  const double v = c_H_constant(0.75);
  char buf[96];
  std::snprintf(buf, sizeof buf, "c_H(0.75) = %.10f, fixture %.5f, diff %.2e", v, kCH075, std::abs(v - kCH075));
  return {std::abs(v - kCH075) <= tol, buf};
}

GaussianSanity gaussian_sanity(std::size_t n_paths, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = ExperimentConfig::defaults("linear");
  cfg.n_paths = n_paths;
  cfg.seed = seed;
  cfg.x_min = -3.0;
  cfg.x_max = 3.0;
  cfg.x_points = 121;
  const ExperimentReport r = run_experiment(cfg);
  const DensityEstimate& d = *r.density("nourdin_viens");
  double worst = 0.0;
  for (std::size_t i = 0; i < d.x_grid.size(); ++i) {
    const double x = d.x_grid[i];
    if (std::abs(x) > 3.0 + 1e-12) continue;
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(d.values[i] - phi));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst, secs, d.mass};
}

}  // namespace maldens::checks
