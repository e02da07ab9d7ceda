#pragma once

// Time grids and the one-dimensional quadrature rules used throughout:
// trapezoid sums on a TimeGrid, Gauss-Laguerre for integrals against e^{-u}
// on [0, inf), Gauss-Jacobi for algebraic end-point singularities on [0, 1],
// and Gauss-Legendre panels graded geometrically toward singular ends.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace maldens {

inline constexpr std::size_t kDefaultLaguerreNodes = 32;
inline constexpr std::size_t kDefaultJacobiNodes = 24;

class TimeGrid {
 public:
  // Strictly increasing, first point 0, at least two points.
  explicit TimeGrid(std::vector<double> points);

  static TimeGrid uniform(double horizon, std::size_t n_points);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t cells() const noexcept { return points_.size() - 1; }
  double horizon() const noexcept { return points_.back(); }
  double operator[](std::size_t i) const noexcept { return points_[i]; }
  double cell_width(std::size_t j) const noexcept { return points_[j + 1] - points_[j]; }

  bool is_uniform() const noexcept { return uniform_; }
  // Spacing of a uniform grid; throws InvalidArgument otherwise.
  double spacing() const;

  // w such that dot(w, v) is the trapezoid sum of v.
  const std::vector<double>& trapezoid_weights() const noexcept { return weights_; }

  bool operator==(const TimeGrid& other) const noexcept { return points_ == other.points_; }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  bool uniform_ = false;
};

TimeGrid uniform_grid(double horizon, std::size_t n_points);

double trapezoid(std::span<const double> values, const TimeGrid& grid);

// Running trapezoid integral from grid point 0; out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> values, const TimeGrid& grid);

enum class RuleKind { laguerre, jacobi, legendre };

struct QuadratureRule {
  RuleKind kind;
  std::vector<double> nodes;
  std::vector<double> weights;
  double alpha = 0.0;  // jacobi: exponent of w
  double beta = 0.0;   // jacobi: exponent of (1 - w)

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double apply(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

// Weight e^{-u} on [0, inf). Weights sum to 1.
QuadratureRule gauss_laguerre(std::size_t n);

// Weight w^alpha (1 - w)^beta on [0, 1]; alpha, beta > -1.
QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta = 0.0);

// Unit weight on [0, 1].
QuadratureRule gauss_legendre(std::size_t n);

// Process-wide cache of the rules above; references stay valid for the
// lifetime of the program.
const QuadratureRule& cached_rule(RuleKind kind, std::size_t n, double alpha = 0.0,
                                  double beta = 0.0);

// Approximates the integral of e^{-u} f(u) over [0, inf).
double laguerre_expectation(const std::function<double(double)>& f,
                            std::size_t n_nodes = kDefaultLaguerreNodes);

// Approximates the integral of w^alpha g(w) over [0, 1], alpha > -1.
double jacobi_singular_integral(const std::function<double(double)>& g, double alpha,
                                std::size_t n_nodes = kDefaultJacobiNodes);

// Behaviour of an integrand at one end of an interval. A singular end is
// resolved by geometric panels (ratio 2); the innermost panel is integrated
// with a Jacobi rule for |x - end|^exponent.
struct EndBehavior {
  bool singular = false;
  double exponent = 0.0;
  int levels = 48;
};

double graded_integral(const std::function<double(double)>& f, double a, double b,
                       EndBehavior left = {}, EndBehavior right = {}, std::size_t nodes = 12);

}  // namespace maldens
