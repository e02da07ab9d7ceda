#pragma once

// The three functional classes: linear functionals of Brownian motion,
// additive functionals int_0^T f(X_s) ds of a Gaussian process, and the
// value at time t of a one-dimensional SDE driven by fBm with H > 1/2.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "maldens/gaussian_process.hpp"
#include "maldens/quadrature.hpp"
#include "maldens/volterra.hpp"

namespace maldens {

// F = int h dW, discretized as sum_j h_mid_j dW_j with h_mid the cell mean
// of h. The discrete F is exactly N(0, variance()).
struct LinearFunctionalModel {
  TimeGrid grid;
  std::vector<double> h;  // density at grid points

  static LinearFunctionalModel constant(const TimeGrid& grid, double sigma);
  double variance() const;
};

struct LinearEval {
  double F;
  std::vector<double> DF;  // equals h on every path
};

LinearEval linear_eval(const LinearFunctionalModel& model, std::span<const double> dw);

enum class Convexity { convex, concave, neither };

// Y = int_0^T f(X_s) ds - centering with f(x) = A x + B exp(kappa x).
// This family covers the additive presets and keeps every Mehler
// expectation a product of a path factor and a copy factor.
struct AdditiveFunctionalModel {
  std::string name;
  double A = 1.0, B = 0.0, kappa = 0.0;
  double c = 1.0;  // asserted lower bound on |f'|
  CovarianceModel cov;
  TimeGrid grid;
  double centering = 0.0;

  double f(double x) const { return A * x + B * std::exp(kappa * x); }
  double fp(double x) const { return A + B * kappa * std::exp(kappa * x); }
  double fpp(double x) const { return B * kappa * kappa * std::exp(kappa * x); }
  bool is_linear() const { return B == 0.0 || kappa == 0.0; }
  // Sign of f'', which is fixed for this family.
  Convexity convexity() const;
};

// Presets: "additive-exp" f = x + e^x, "additive-linear" f = 2x,
// "additive-concave" f = x - e^{-x}.
AdditiveFunctionalModel make_additive(const std::string& preset, double c,
                                      const CovarianceModel& cov, const TimeGrid& grid);

struct AdditiveEval {
  double Y;
  std::vector<double> DY;  // density f'(X_s) of the derivative element
};

AdditiveEval additive_eval(const AdditiveFunctionalModel& model, std::span<const double> x);

// Monte Carlo estimate of int_0^T E f(X_s) ds over paths of stream `seed`.
// Exact without sampling when f has no exponential part.
double estimate_centering(const AdditiveFunctionalModel& model, std::size_t n_paths,
                          std::uint64_t seed);

struct SdeCoefficients {
  double b;
  double sigma;
  double db_dx;
  double dsigma_dt;
  double dsigma_dx;
};

// euler: X += b dt + sigma dB, left point. taylor2 adds the second-order
// Young terms 1/2 sigma sigma'_x dB^2 + 1/2 (sigma'_t + b sigma'_x + sigma b'_x) dt dB
// + 1/2 b b'_x dt^2; Euler's strong error is O(dt^{2H-1}), taylor2's O(dt^{3H-1}).
enum class SdeScheme { euler, taylor2 };

struct FbmSdeModel {
  std::string name;
  double x0 = 0.0;
  double T = 1.0;
  double H = 0.75;
  std::function<SdeCoefficients(double t, double x)> coef;
  double c = 1.0;        // asserted lower bound on |sigma|
  double M = 1.0;        // asserted bound on |m|, |m'_x sigma|, |sigma'_x|
  double m_bound = 1.0;  // asserted bound on |m| alone (0 when m vanishes)
  SdeScheme scheme = SdeScheme::euler;
};

// b = sigma = 2 + sin x; m vanishes identically and |sigma'_x| <= 1.
FbmSdeModel make_sde_sine(double x0, double H, double T, double c = 1.0, double M = 1.0);

// b = a0 + a1 x, sigma = s0 + s1 sin x.
FbmSdeModel make_sde_custom(double x0, double H, double T, double a0, double a1, double s0,
                            double s1, double c, double M, double m_bound);

// m = b'_x - b sigma'_x / sigma - sigma'_t / sigma; throws ModelViolation
// when |sigma| < c.
double m_function(const FbmSdeModel& model, double t, double x);

struct SdePath {
  std::vector<double> x;      // state at grid points
  std::vector<double> m;      // m(t_i, x_i)
  std::vector<double> sigma;  // sigma(t_i, x_i)
  std::vector<double> dsigma_dx;
};

// Left-point Euler for the Young integral,
//   X_{i+1} = X_i + b(t_i, X_i) dt_i + sigma(t_i, X_i) (B_{i+1} - B_i),
// or its taylor2 refinement per model.scheme, given fBm values bh on the
// grid. Steps start at index `from` with
// out.x[from] already set; entries before `from` are left untouched.
void sde_solve_from(const FbmSdeModel& model, const TimeGrid& grid, std::span<const double> bh,
                    std::size_t from, SdePath& out);

// Full solve from x0 with B^H synthesized from the Brownian increments.
SdePath sde_solve(const FbmSdeModel& model, const KernelMatrix& km, std::span<const double> dw);

// Cell-averaged D_s X_{t_n} for s in cells j < n. With E_c = exp(int_{t_c}^{t_n} m),
//   phi_j = sum_{c=j}^{n-1} (kbar(c+1, j) - kbar(c, j)) (E_c + E_{c+1}) / 2,
// a summation by parts of int_s^t dK/dv(v, s) E(v) dv, and D_j = sigma(t_n, X_n) phi_j.
// Every coefficient is nonnegative, so e^{-MT} kbar <= phi <= e^{MT} kbar holds exactly.
std::vector<double> sde_malliavin_derivative(const KernelMatrix& km, const SdePath& path,
                                             std::size_t n);

// The same quantity for a single cell j < n.
double sde_malliavin_derivative_cell(const KernelMatrix& km, const SdePath& path, std::size_t n,
                                     std::size_t j);

}  // namespace maldens
