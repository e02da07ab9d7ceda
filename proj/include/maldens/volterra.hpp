#pragma once

// The Volterra kernel K_H of fractional Brownian motion (H > 1/2),
//   B^H_t = int_0^t K_H(t, s) dW_s,
//   K_H(t, s) = c_H s^{1/2-H} int_s^t (u - s)^{H-3/2} u^{H-1/2} du,
// and the synthesis of fBm paths from Brownian increments on a grid.

#include <memory>
#include <span>

#include "maldens/gaussian_process.hpp"
#include "maldens/linalg.hpp"
#include "maldens/quadrature.hpp"

namespace maldens {

// sqrt(H (2H - 1) / B(2 - 2H, H - 1/2)); requires 1/2 < H < 1.
double c_H_constant(double H);

class VolterraKernel {
 public:
  explicit VolterraKernel(double H, std::size_t jacobi_nodes = kDefaultJacobiNodes);

  double hurst() const noexcept { return H_; }
  double c_h() const noexcept { return c_; }

  // 0 < s <= t; K(t, t) = 0.
  double operator()(double t, double s) const;
  // Partial derivative in t, 0 < s < t.
  double dt(double t, double s) const;

  // int_0^t K(t, s)^2 ds, which equals t^{2H}.
  double l2_norm_squared(double t) const;

  // (1 / (b - a)) int_a^b K(t, s) ds for 0 <= a < b <= t.
  double cell_average(double t, double a, double b) const;

 private:
  double inner(double r) const;

  double H_, c_;
  const QuadratureRule* jacobi_;   // weight w^{H-3/2} on [0, 1]
  const QuadratureRule* legendre_;
  double j0_;                      // int_0^1 v^{H-3/2} (1 + v)^{H-1/2} dv
};

double kernel_K_H(const VolterraKernel& k, double t, double s);
double kernel_dt(const VolterraKernel& k, double t, double s);

// Cell-averaged kernel on a grid: kbar(i, j) is the average of K(t_i, .)
// over cell j = [t_j, t_{j+1}] for j < i and 0 otherwise.
struct KernelMatrix {
  TimeGrid grid;
  double H;
  Matrix kbar;  // grid.size() x grid.cells()
};

// Built once per (grid, H) and shared; safe to call from many threads.
std::shared_ptr<const KernelMatrix> kernel_matrix(const VolterraKernel& k, const TimeGrid& grid);

// B^H(t_i) = sum_j kbar(i, j) dW_j for one path; out has grid.size() entries.
void fbm_path(const KernelMatrix& km, std::span<const double> dw, std::span<double> out);

// dW is n_paths x grid.cells().
PathSet fbm_from_bm(const VolterraKernel& k, const Matrix& dw, const TimeGrid& grid);

}  // namespace maldens
