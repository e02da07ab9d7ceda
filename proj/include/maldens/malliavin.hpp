#pragma once

// Per-path samples of G_F = <DF, -DL^{-1}F> (Mehler formula with independent
// copies), the h-term <DG_F, -DL^{-1}F> / G_F^2, and the Clark-Ocone
// quantity Phi_F = int D_sF E[D_sF | F_s] ds by nested simulation.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "maldens/gaussian_process.hpp"
#include "maldens/linalg.hpp"
#include "maldens/models.hpp"
#include "maldens/quadrature.hpp"
#include "maldens/volterra.hpp"

namespace maldens {

// Density a(.) on the grid of the element int_0^T a(s) 1_{[0,s]} ds, or an
// L^2[0,T] function when the driver is Brownian motion itself.
struct HElement {
  std::vector<double> density;
};

// int int a(s) b(v) R(s, v) ds dv by double trapezoid.
double h_inner(const HElement& a, const HElement& b, const CovarianceModel& cov,
               const TimeGrid& grid);
// int a b dt by trapezoid.
double h_inner_l2(const HElement& a, const HElement& b, const TimeGrid& grid);

struct MehlerConfig {
  std::size_t laguerre_nodes = kDefaultLaguerreNodes;
  std::size_t n_copies = 64;
  std::uint64_t copy_seed = 0;
  // Replaces the Gauss-Laguerre rule (testing hook).
  std::optional<QuadratureRule> rule;
};

inline constexpr double kDegenerateG = 1e-10;

struct AdditiveSample {
  double Y;
  double G;
  double h;
  double min_fp;  // smallest |f'(X_s)| on the path, for the f' floor audit
};

// Shares one pool of independent copies X' across all paths and Laguerre
// nodes. For f = A x + B e^{kappa x} the copy expectation factorizes as
//   E'[f'(alpha x + beta X')] = A + B kappa e^{kappa alpha x} E'[e^{kappa beta X'}],
// so the copy averages are computed once per (node, time).
class AdditiveEngine {
 public:
  AdditiveEngine(const AdditiveFunctionalModel& model, const MehlerConfig& cfg);
  // copies: n_copies x grid.size() paths of the same covariance.
  AdditiveEngine(const AdditiveFunctionalModel& model, const MehlerConfig& cfg, const Matrix& copies);

  const AdditiveFunctionalModel& model() const noexcept { return model_; }

  // psi, the density of -DL^{-1}Y.
  HElement u_density(std::span<const double> x) const;
  // chi(s) = int e^{-2u} E'[f''(e^{-u} X_s + sqrt(1 - e^{-2u}) X'_s)] du.
  std::vector<double> second_order_factor(std::span<const double> x) const;

  // Throws ModelViolation when |G| < kDegenerateG.
  AdditiveSample evaluate(std::span<const double> x) const;

 private:
  void init(const Matrix& copies);
  void apply_rw(std::span<const double> v, std::span<double> out) const;

  AdditiveFunctionalModel model_;
  QuadratureRule rule_;
  std::vector<double> alpha_;     // e^{-u_k}
  Matrix copy_factor_;            // (node, time) -> mean_c e^{kappa beta_k X'_c(t)}
  Matrix rw_;                     // R(t_i, t_j) w_j
  std::vector<double> w_;
};

HElement mehler_u_density(const AdditiveFunctionalModel& model, std::span<const double> x,
                          const PathSet& copies, const MehlerConfig& cfg);
double g_sample_additive(const AdditiveFunctionalModel& model, std::span<const double> x,
                         const PathSet& copies, const MehlerConfig& cfg);
double h_term_additive(const AdditiveFunctionalModel& model, std::span<const double> x,
                       const PathSet& copies, const MehlerConfig& cfg);

// Brownian increments of n_copies independent copies, n_copies x cells.
Matrix sample_increments(const TimeGrid& grid, std::size_t n, std::uint64_t seed);
// Increments of path `index` in stream `seed`.
void path_increments(const TimeGrid& grid, std::uint64_t seed, std::uint64_t index,
                     std::span<double> dw);

// G sample for F = X_{t_n}: pairs the cell-averaged derivative with its
// Mehler average over copies, re-solving on e^{-u} W + sqrt(1 - e^{-2u}) W'.
double g_sample_sde(const FbmSdeModel& model, const KernelMatrix& km, std::span<const double> dw,
                    const Matrix& copies_dw, const MehlerConfig& cfg, std::size_t n);

struct NestedConfig {
  std::size_t n_sub = 128;
  std::uint64_t sub_seed = 0;
};

// Fills the increments of cells j.. for sub-path `sub` of cell j.
using FutureSource =
    std::function<void(std::size_t j, std::size_t sub, std::span<double> future_dw)>;

struct PhiSample {
  double phi;
  double se;               // nested Monte Carlo standard error of phi
  std::vector<double> d;   // D_j X_{t_n}, j < n
};

// Phi for F = X_{t_n}. For each cell j the increments before j are frozen and
// those from j on are redrawn n_sub times; by default the draws come from the
// stream (sub_seed, path_index, j).
PhiSample phi_clark_ocone(const FbmSdeModel& model, const KernelMatrix& km,
                          std::span<const double> dw, std::size_t n, const NestedConfig& cfg,
                          std::uint64_t path_index, const FutureSource& future = {});

// 2 M (1 + T) e^{2 M T} / c.
double sde_h_bound(const FbmSdeModel& model);

}  // namespace maldens
