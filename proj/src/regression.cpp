#include "maldens/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "maldens/error.hpp"
#include "maldens/simd/kernels.hpp"

namespace maldens {

double empirical_quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw DegenerateData("quantile of an empty sample");
  std::vector<double> v(samples.begin(), samples.end());
  const auto n = static_cast<double>(v.size());
  auto k = static_cast<std::size_t>(std::ceil(p * n));
  k = std::clamp<std::size_t>(k, 1, v.size()) - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

double silverman_bandwidth(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw DegenerateData("bandwidth needs at least two samples");
  const double mean = simd::sum(samples) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateData("bandwidth: samples have zero spread");
  const double iqr = empirical_quantile(samples, 0.75) - empirical_quantile(samples, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 1.06 * spread * std::pow(static_cast<double>(n), -0.2);
}

std::size_t RegressionEstimate::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

RegressionEstimate nadaraya_watson(std::span<const double> f, std::span<const double> z,
                                   std::span<const double> x_grid, double bandwidth,
                                   const TrustPolicy& trust) {
  if (!(bandwidth > 0.0)) throw InvalidArgument("nadaraya_watson: bandwidth must be positive");
  if (f.size() != z.size()) throw InvalidArgument("nadaraya_watson: F and Z differ in length");
  if (f.empty()) throw DegenerateData("nadaraya_watson: no samples");
  const auto& k = simd::active();
  const double inv = 1.0 / bandwidth;
  RegressionEstimate est{std::vector<double>(x_grid.begin(), x_grid.end()),
                         std::vector<double>(x_grid.size()), std::vector<double>(x_grid.size()),
                         std::vector<bool>(x_grid.size()), bandwidth};
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    // Shift the exponent so the nearest sample has weight 1; nothing underflows
    // to an all-zero weight vector.
    const double shift = 0.5 * k.min_sq_dist(x, f.data(), f.size()) * inv * inv;
    const simd::GaussSums s = k.gauss_sums(x, inv, shift, f.data(), z.data(), f.size());
    est.values[i] = s.wz / s.w;
    est.n_effective[i] = s.w * s.w / s.w2;
    est.flagged[i] = est.n_effective[i] < trust.min_effective || x < trust.lo || x > trust.hi;
  }
  return est;
}

double trapezoid_mass(std::span<const double> x, std::span<const double> y) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) m += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return m;
}

DensityEstimate kde_density(std::span<const double> samples, std::span<const double> x_grid,
                            double bandwidth) {
  if (!(bandwidth > 0.0)) throw InvalidArgument("kde_density: bandwidth must be positive");
  if (samples.empty()) throw DegenerateData("kde_density: no samples");
  const auto& k = simd::active();
  const double inv = 1.0 / bandwidth;
  const double norm = inv / (static_cast<double>(samples.size()) * std::sqrt(2.0 * std::numbers::pi));
  DensityEstimate d{"kde", std::vector<double>(x_grid.begin(), x_grid.end()),
                    std::vector<double>(x_grid.size()), 0.0};
  for (std::size_t i = 0; i < x_grid.size(); ++i)
    d.values[i] = norm * k.gauss_sums(x_grid[i], inv, 0.0, samples.data(), nullptr, samples.size()).w;
  d.mass = trapezoid_mass(d.x_grid, d.values);
  return d;
}

}  // namespace maldens
