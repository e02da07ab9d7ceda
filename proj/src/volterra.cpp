#include "maldens/volterra.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "maldens/error.hpp"
#include "maldens/parallel.hpp"
#include "maldens/simd/kernels.hpp"

namespace maldens {

double c_H_constant(double H) {
  if (!(H > 0.5 && H < 1.0))
    throw InvalidArgument("c_H: Hurst parameter must lie in (1/2, 1), got " + std::to_string(H));
  const double log_beta = std::lgamma(2.0 - 2.0 * H) + std::lgamma(H - 0.5) - std::lgamma(1.5 - H);
  return std::sqrt(H * (2.0 * H - 1.0) * std::exp(-log_beta));
}

VolterraKernel::VolterraKernel(double H, std::size_t jacobi_nodes) : H_(H), c_(c_H_constant(H)) {
  const double a = H - 1.5, b = H - 0.5;
  jacobi_ = &cached_rule(RuleKind::jacobi, jacobi_nodes, a, 0.0);
  legendre_ = &cached_rule(RuleKind::legendre, 16);
  j0_ = jacobi_->apply([b](double v) { return std::pow(1.0 + v, b); });
}

// I(r) = int_0^1 w^a (r + w)^b dw with a = H - 3/2, b = H - 1/2.
double VolterraKernel::inner(double r) const {
  const double a = H_ - 1.5, b = H_ - 0.5;
  if (r >= 1.0) return jacobi_->apply([r, b](double w) { return std::pow(r + w, b); });
  // Near w = 0 the factor (r + w)^b varies on the scale r: rescale [0, r]
  // onto the Jacobi rule and cover [r, 1] by geometric Legendre panels.
  double acc = std::pow(r, a + b + 1.0) * j0_;
  auto f = [a, b, r](double w) { return std::pow(w, a) * std::pow(r + w, b); };
  for (double lo = r; lo < 1.0; lo *= 2.0) {
    const double hi = std::min(1.0, 2.0 * lo);
    double panel = 0.0;
    for (std::size_t i = 0; i < legendre_->size(); ++i)
      panel += legendre_->weights[i] * f(lo + (hi - lo) * legendre_->nodes[i]);
    acc += panel * (hi - lo);
  }
  return acc;
}

double VolterraKernel::operator()(double t, double s) const {
  if (!(s > 0.0)) throw InvalidArgument("K_H: s must be positive, got " + std::to_string(s));
  if (s > t) throw InvalidArgument("K_H: s > t");
  if (s == t) return 0.0;
  const double d = t - s;
  return c_ * std::pow(s, 0.5 - H_) * std::pow(d, 2.0 * H_ - 1.0) * inner(s / d);
}

double VolterraKernel::dt(double t, double s) const {
  if (!(s > 0.0)) throw InvalidArgument("kernel_dt: s must be positive");
  if (s >= t) throw InvalidArgument("kernel_dt: requires s < t");
  return c_ * std::pow(s, 0.5 - H_) * std::pow(t - s, H_ - 1.5) * std::pow(t, H_ - 0.5);
}

double VolterraKernel::l2_norm_squared(double t) const {
  if (!(t > 0.0)) return 0.0;
  auto sq = [this, t](double s) {
    const double k = (*this)(t, s);
    return k * k;
  };
  return graded_integral(sq, 0.0, t, EndBehavior{true, 1.0 - 2.0 * H_},
                         EndBehavior{true, 2.0 * H_ - 1.0});
}

double VolterraKernel::cell_average(double t, double a, double b) const {
  if (!(a >= 0.0 && b > a && b <= t)) throw InvalidArgument("cell_average: need 0 <= a < b <= t");
  auto k = [this, t](double s) { return (*this)(t, s); };
  const EndBehavior left = a == 0.0 ? EndBehavior{true, 0.5 - H_} : EndBehavior{};
  const EndBehavior right = b == t ? EndBehavior{true, H_ - 0.5} : EndBehavior{};
  return graded_integral(k, a, b, left, right) / (b - a);
}

double kernel_K_H(const VolterraKernel& k, double t, double s) { return k(t, s); }
double kernel_dt(const VolterraKernel& k, double t, double s) { return k.dt(t, s); }

std::shared_ptr<const KernelMatrix> kernel_matrix(const VolterraKernel& k, const TimeGrid& grid) {
  using Key = std::pair<double, std::vector<double>>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const KernelMatrix>> cache;
  Key key{k.hurst(), std::vector<double>(grid.points().begin(), grid.points().end())};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto km = std::make_shared<KernelMatrix>(KernelMatrix{grid, k.hurst(), Matrix(grid.size(), grid.cells())});
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < i; ++j) km->kbar(i, j) = k.cell_average(grid[i], grid[j], grid[j + 1]);
  });
  cache.emplace(std::move(key), km);
  return km;
}

void fbm_path(const KernelMatrix& km, std::span<const double> dw, std::span<double> out) {
  const std::size_t n = km.grid.size();
  if (dw.size() != n - 1 || out.size() != n) throw InvalidArgument("fbm_path: size mismatch");
  out[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) out[i] = simd::dot(km.kbar.row(i).first(i), dw.first(i));
}

PathSet fbm_from_bm(const VolterraKernel& k, const Matrix& dw, const TimeGrid& grid) {
  if (dw.rows() > 0 && dw.cols() != grid.cells())
    throw InvalidArgument("fbm_from_bm: increments have " + std::to_string(dw.cols()) +
                          " columns for " + std::to_string(grid.cells()) + " cells");
  PathSet set{grid, Matrix(dw.rows(), grid.size()), dw, 0};
  if (dw.rows() == 0) return set;
  const auto km = kernel_matrix(k, grid);
  parallel_for(dw.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) fbm_path(*km, dw.row(i), set.paths.row(i));
  });
  return set;
}

}  // namespace maldens
