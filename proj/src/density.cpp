#include "maldens/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maldens/error.hpp"
#include "maldens/simd/kernels.hpp"

namespace maldens {

std::vector<double> FunctionalSamples::w() const {
  std::vector<double> out(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) out[i] = F[i] / G[i];
  return out;
}

std::vector<double> FunctionalSamples::delta() const {
  if (!has_h()) throw InvalidArgument("delta values need h samples");
  std::vector<double> out(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) out[i] = F[i] / G[i] + h[i];
  return out;
}

namespace {

void check_samples(const FunctionalSamples& s) {
  if (s.F.empty()) throw DegenerateData("density reconstruction: empty sample set");
  if (s.G.size() != s.F.size()) throw InvalidArgument("density reconstruction: F and G differ in length");
  for (double g : s.G)
    if (!(g != 0.0) || !std::isfinite(g)) throw ModelViolation("density reconstruction: G sample is zero");
}

std::size_t zero_index(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] == 0.0) return i;
  throw InvalidArgument("density grid must contain 0 as a node");
}

// int_0^{x_i} v by trapezoid, accumulated outward from the zero node.
std::vector<double> integral_from_zero(std::span<const double> x, std::span<const double> v) {
  const std::size_t z = zero_index(x);
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = z + 1; i < x.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (v[i] + v[i - 1]);
  for (std::size_t i = z; i-- > 0;)
    out[i] = out[i + 1] - 0.5 * (x[i + 1] - x[i]) * (v[i] + v[i + 1]);
  return out;
}

}  // namespace

DensityEstimate density_nourdin_viens(const FunctionalSamples& s, std::span<const double> x_grid,
                                      double bandwidth, const TrustPolicy& trust,
                                      std::optional<double> e_abs_f, ReconstructionInfo* info,
                                      const std::string& method) {
  check_samples(s);
  const RegressionEstimate g = nadaraya_watson(s.F, s.G, x_grid, bandwidth, trust);
  std::vector<double> gc = g.values, ratio(x_grid.size());
  std::size_t clamped = 0;
  for (double& v : gc)
    if (!(v >= kClampFloor)) {
      v = kClampFloor;
      ++clamped;
    }
  if (static_cast<double>(clamped) > 0.01 * static_cast<double>(x_grid.size()))
    throw RegressionFailure("conditional mean of G is non-positive at " + std::to_string(clamped) +
                            " of " + std::to_string(x_grid.size()) + " grid points");
  double eabs = 0.0;
  if (e_abs_f) {
    eabs = *e_abs_f;
  } else {
    std::vector<double> a(s.F.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(s.F[i]);
    eabs = simd::sum(a) / static_cast<double>(a.size());
  }
  for (std::size_t i = 0; i < x_grid.size(); ++i) ratio[i] = x_grid[i] / gc[i];
  const std::vector<double> expo = integral_from_zero(x_grid, ratio);
  DensityEstimate d{method, std::vector<double>(x_grid.begin(), x_grid.end()),
                    std::vector<double>(x_grid.size()), 0.0};
  for (std::size_t i = 0; i < x_grid.size(); ++i)
    d.values[i] = eabs / (2.0 * gc[i]) * std::exp(-expo[i]);
  d.mass = trapezoid_mass(d.x_grid, d.values);
  if (info) *info = {clamped, g.flagged_count(), eabs};
  return d;
}

DensityEstimate density_new_representation(const FunctionalSamples& s,
                                           std::span<const double> x_grid, double bandwidth,
                                           const TrustPolicy& trust, ReconstructionInfo* info) {
  check_samples(s);
  if (!s.has_h()) throw InvalidArgument("new representation needs h samples");
  // E[F / G | F = z] = z E[1 / G | F = z]; smoothing 1/G keeps the factor z exact.
  std::vector<double> inv_g(s.G.size());
  for (std::size_t i = 0; i < inv_g.size(); ++i) inv_g[i] = 1.0 / s.G[i];
  const RegressionEstimate w = nadaraya_watson(s.F, inv_g, x_grid, bandwidth, trust);
  const RegressionEstimate h = nadaraya_watson(s.F, s.h, x_grid, bandwidth, trust);
  std::vector<double> sum(x_grid.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = x_grid[i] * w.values[i] + h.values[i];
  const std::vector<double> expo = integral_from_zero(x_grid, sum);
  DensityEstimate d{"new_repr", std::vector<double>(x_grid.begin(), x_grid.end()),
                    std::vector<double>(x_grid.size()), 0.0};
  for (std::size_t i = 0; i < x_grid.size(); ++i) d.values[i] = std::exp(-expo[i]);
  const double raw = trapezoid_mass(d.x_grid, d.values);
  if (!(raw > 0.0) || !std::isfinite(raw))
    throw RegressionFailure("new representation: shape has no finite mass");
  for (double& v : d.values) v /= raw;
  d.mass = trapezoid_mass(d.x_grid, d.values);
  if (info) *info = {0, std::max(w.flagged_count(), h.flagged_count()), 0.0};
  return d;
}

namespace {

IndicatorValue tail_mean(std::span<const double> f, std::span<const double> delta, double x, bool upper) {
  if (f.size() != delta.size()) throw InvalidArgument("indicator_density: length mismatch");
  if (f.empty()) throw DegenerateData("indicator_density: no samples");
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = (f[i] > x) == upper ? (upper ? delta[i] : -delta[i]) : 0.0;
  const double n = static_cast<double>(f.size());
  const double mean = simd::sum(v) / n;
  double ss = 0.0;
  for (double e : v) ss += (e - mean) * (e - mean);
  const double se = f.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

}  // namespace

IndicatorValue indicator_density(std::span<const double> f, std::span<const double> delta, double x) {
  return tail_mean(f, delta, x, true);
}

IndicatorValue indicator_density_lower(std::span<const double> f, std::span<const double> delta, double x) {
  return tail_mean(f, delta, x, false);
}

Envelopes gaussian_envelopes(const BoundCertificate& c, std::span<const double> x_grid) {
  if (!(c.sigma_min_sq > 0.0)) throw InvalidArgument("envelope: sigma_min^2 must be positive");
  if (!(c.rho0 > 0.0)) throw InvalidArgument("envelope: rho0 must be positive");
  if (!c.m1 && !c.m2 && !c.M_h)
    throw InvalidArgument("envelope: no bound on h (m1, m2 or M_h) was supplied");
  if (c.sigma_max_sq && *c.sigma_max_sq < c.sigma_min_sq)
    throw InvalidArgument("envelope: sigma_max^2 < sigma_min^2");
  const double inf = std::numeric_limits<double>::infinity();
  Envelopes e{std::vector<double>(x_grid.size(), 0.0), std::vector<double>(x_grid.size(), inf),
              c.sigma_max_sq.has_value()};
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    // Lower bound: h >= m1 controls x <= 0, h <= m2 controls x >= 0.
    std::optional<double> lin;
    if (x <= 0.0 && c.m1) lin = *c.m1 * x;
    else if (x >= 0.0 && c.m2) lin = *c.m2 * x;
    else if (c.M_h) lin = *c.M_h * std::abs(x);
    if (lin) e.lower[i] = c.rho0 * std::exp(-x * x / (2.0 * c.sigma_min_sq) - *lin);
    if (c.sigma_max_sq) {
      std::optional<double> up;
      if (x >= 0.0 && c.m1) up = *c.m1 * x;
      else if (x <= 0.0 && c.m2) up = *c.m2 * x;
      else if (c.M_h) up = -*c.M_h * std::abs(x);
      if (up) e.upper[i] = c.rho0 * std::exp(-x * x / (2.0 * *c.sigma_max_sq) - *up);
    }
  }
  return e;
}

Envelopes sandwich_envelopes(double sigma_min_sq, double sigma_max_sq, double e_abs_f,
                             std::span<const double> x_grid) {
  if (!(sigma_min_sq > 0.0) || !(sigma_max_sq >= sigma_min_sq))
    throw InvalidArgument("sandwich: need 0 < sigma_min^2 <= sigma_max^2");
  if (!(e_abs_f > 0.0)) throw InvalidArgument("sandwich: E|F| must be positive");
  Envelopes e{std::vector<double>(x_grid.size()), std::vector<double>(x_grid.size()), true};
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x2 = x_grid[i] * x_grid[i];
    e.lower[i] = e_abs_f / (2.0 * sigma_max_sq) * std::exp(-x2 / (2.0 * sigma_min_sq));
    e.upper[i] = e_abs_f / (2.0 * sigma_min_sq) * std::exp(-x2 / (2.0 * sigma_max_sq));
  }
  return e;
}

ViolationReport check_envelope(std::span<const double> x_grid, std::span<const double> density,
                               std::span<const double> lower, std::span<const double> upper,
                               double slack) {
  if (density.size() != x_grid.size() || lower.size() != x_grid.size() ||
      (!upper.empty() && upper.size() != x_grid.size()))
    throw InvalidArgument("check_envelope: grid mismatch");
  ViolationReport r;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (density[i] < lower[i] * (1.0 - slack))
      r.items.push_back({i, x_grid[i], density[i], lower[i], "lower"});
    if (!upper.empty() && density[i] > upper[i] * (1.0 + slack))
      r.items.push_back({i, x_grid[i], density[i], upper[i], "upper"});
  }
  return r;
}

}  // namespace maldens
