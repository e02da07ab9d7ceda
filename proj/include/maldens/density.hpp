#pragma once

// Density reconstruction from per-path samples and Gaussian envelope
// certificates.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maldens/regression.hpp"

namespace maldens {

// Per-path records. G holds G_F, or Phi_F for the Clark-Ocone route.
struct FunctionalSamples {
  std::vector<double> F;
  std::vector<double> G;
  std::vector<double> h;  // empty when not estimated

  bool has_h() const noexcept { return !h.empty(); }
  std::vector<double> w() const;      // F / G
  std::vector<double> delta() const;  // F / G + h
};

inline constexpr double kClampFloor = 1e-8;

struct ReconstructionInfo {
  std::size_t clamped = 0;       // grid points where g was raised to kClampFloor
  std::size_t flagged = 0;       // grid points outside the trusted regression range
  double e_abs_f = 0.0;
};

// rho(x) = E|F| / (2 g(x)) exp(-int_0^x z / g(z) dz), g = E[G | F = x].
// x_grid must contain 0. Throws RegressionFailure if more than 1% of the
// grid needs clamping. e_abs_f overrides the sample mean of |F|.
DensityEstimate density_nourdin_viens(const FunctionalSamples& s, std::span<const double> x_grid,
                                      double bandwidth, const TrustPolicy& trust = {},
                                      std::optional<double> e_abs_f = std::nullopt,
                                      ReconstructionInfo* info = nullptr,
                                      const std::string& method = "nourdin_viens");

// rho(x) proportional to exp(-int_0^x (h + w)), normalized to unit mass on x_grid.
// w(z) = E[F / G | F = z] is estimated as z E[1 / G | F = z].
DensityEstimate density_new_representation(const FunctionalSamples& s,
                                           std::span<const double> x_grid, double bandwidth,
                                           const TrustPolicy& trust = {},
                                           ReconstructionInfo* info = nullptr);

struct IndicatorValue {
  double value;
  double se;
};

// Sample mean of 1{F > x} delta with its standard error.
IndicatorValue indicator_density(std::span<const double> f, std::span<const double> delta, double x);
// -E[1{F <= x} delta], the same density since E[delta] = 0. Far in the left
// tail it averages almost nothing, where the upper form averages all of delta.
IndicatorValue indicator_density_lower(std::span<const double> f, std::span<const double> delta, double x);

struct BoundCertificate {
  double sigma_min_sq = 0.0;
  std::optional<double> sigma_max_sq;
  std::optional<double> m1;  // h >= m1
  std::optional<double> m2;  // h <= m2
  std::optional<double> M_h;  // |h| <= M_h
  double rho0 = 0.0;
  std::optional<double> e_abs_f;
};

struct Envelopes {
  std::vector<double> lower;  // 0 where no bound applies
  std::vector<double> upper;  // +inf where no bound applies
  bool has_upper = false;
};

// Lower: rho0 exp(-x^2 / (2 s_min) - m1 x) for x <= 0 and with m2 for x >= 0;
// with only M_h, rho0 exp(-x^2 / (2 s_min) - M_h |x|). Upper bounds need
// sigma_max_sq and use the opposite-side h bound.
Envelopes gaussian_envelopes(const BoundCertificate& cert, std::span<const double> x_grid);

// E|F| / (2 s_max) exp(-x^2 / (2 s_min)) <= rho <= E|F| / (2 s_min) exp(-x^2 / (2 s_max)).
Envelopes sandwich_envelopes(double sigma_min_sq, double sigma_max_sq, double e_abs_f,
                             std::span<const double> x_grid);

struct Violation {
  std::size_t index;
  double x;
  double density;
  double bound;
  std::string side;  // "lower" or "upper"
};

struct ViolationReport {
  std::vector<Violation> items;
  bool pass() const noexcept { return items.empty(); }
};

ViolationReport check_envelope(std::span<const double> x_grid, std::span<const double> density,
                               std::span<const double> lower, std::span<const double> upper,
                               double slack);

}  // namespace maldens
