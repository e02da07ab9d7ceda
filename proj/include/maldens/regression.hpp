#pragma once

// Gaussian-kernel smoothing: Nadaraya-Watson conditional means E[Z | F = x]
// and kernel density estimates, with Silverman's bandwidth.

#include <span>
#include <string>
#include <vector>

namespace maldens {

// Type-1 (inverse empirical CDF) quantile of unsorted data.
double empirical_quantile(std::span<const double> samples, double p);

// 1.06 min(sd, IQR / 1.34) n^{-1/5}; falls back to sd when the IQR is 0.
// Throws DegenerateData for fewer than two samples or zero spread.
double silverman_bandwidth(std::span<const double> samples);

struct RegressionEstimate {
  std::vector<double> x_grid;
  std::vector<double> values;
  std::vector<double> n_effective;  // (sum w)^2 / sum w^2
  std::vector<bool> flagged;        // not trustworthy (thin data or outside range)
  double bandwidth = 0.0;
  std::size_t flagged_count() const;
};

struct TrustPolicy {
  double min_effective = 5.0;
  // Points outside [lo, hi] are flagged; defaults accept everything.
  double lo = -1e300, hi = 1e300;
};

RegressionEstimate nadaraya_watson(std::span<const double> f, std::span<const double> z,
                                   std::span<const double> x_grid, double bandwidth,
                                   const TrustPolicy& trust = {});

struct DensityEstimate {
  std::string method;
  std::vector<double> x_grid;
  std::vector<double> values;
  double mass = 0.0;  // trapezoid integral over x_grid
};

double trapezoid_mass(std::span<const double> x, std::span<const double> y);

DensityEstimate kde_density(std::span<const double> samples, std::span<const double> x_grid,
                            double bandwidth);

}  // namespace maldens
