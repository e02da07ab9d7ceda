#include "maldens/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "maldens/error.hpp"

namespace maldens {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidArgument("TimeGrid needs at least 2 points");
  if (points_.front() != 0.0) throw InvalidArgument("TimeGrid must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1]) || !std::isfinite(points_[i]))
      throw InvalidArgument("TimeGrid must be strictly increasing and finite");
  }
  const std::size_t n = points_.size();
  weights_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = points_[i + 1] - points_[i];
    weights_[i] += 0.5 * h;
    weights_[i + 1] += 0.5 * h;
  }
  const double h0 = points_[1] - points_[0];
  uniform_ = true;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (std::abs((points_[i + 1] - points_[i]) - h0) > 1e-12 * points_.back()) {
      uniform_ = false;
      break;
    }
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_points) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InvalidArgument("uniform grid: horizon must be positive, got " + std::to_string(horizon));
  if (n_points < 2) throw InvalidArgument("uniform grid: need at least 2 points");
  std::vector<double> pts(n_points);
  const double step = horizon / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) pts[i] = step * static_cast<double>(i);
  pts.back() = horizon;
  return TimeGrid(std::move(pts));
}

double TimeGrid::spacing() const {
  if (!uniform_) throw InvalidArgument("TimeGrid is not uniform");
  return horizon() / static_cast<double>(cells());
}

TimeGrid uniform_grid(double horizon, std::size_t n_points) {
  return TimeGrid::uniform(horizon, n_points);
}

double trapezoid(std::span<const double> values, const TimeGrid& grid) {
  if (values.size() != grid.size())
    throw InvalidArgument("trapezoid: " + std::to_string(values.size()) + " values for " +
                          std::to_string(grid.size()) + " grid points");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    acc += grid.cell_width(i) * (values[i] + values[i + 1]) * 0.5;
  return acc;
}

std::vector<double> cumulative_trapezoid(std::span<const double> values, const TimeGrid& grid) {
  if (values.size() != grid.size()) throw InvalidArgument("cumulative_trapezoid: size mismatch");
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    out[i + 1] = out[i] + grid.cell_width(i) * (values[i] + values[i + 1]) * 0.5;
  return out;
}

namespace {

// Monic three-term recurrence p_{k+1} = (x - a_k) p_k - b_k p_{k-1}
// for a positive weight of total mass mu0.
struct Recurrence {
  std::vector<double> a;  // a_0 .. a_{n-1}
  std::vector<double> b;  // b_0 unused, b_1 .. b_n
  double mu0;
};

// Orthonormal polynomial p_n and its derivative at x, plus sum_{k<n} p_k^2.
struct OrthoEval {
  double p, dp, christoffel_sum;
};

OrthoEval evaluate(const Recurrence& r, std::size_t n, double x) {
  double pm1 = 0.0, dpm1 = 0.0;
  double p = 1.0 / std::sqrt(r.mu0), dp = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += p * p;
    const double sb_next = std::sqrt(r.b[k + 1]);
    const double sb = k == 0 ? 0.0 : std::sqrt(r.b[k]);
    const double pn = ((x - r.a[k]) * p - sb * pm1) / sb_next;
    const double dpn = (p + (x - r.a[k]) * dp - sb * dpm1) / sb_next;
    pm1 = p;
    dpm1 = dp;
    p = pn;
    dp = dpn;
  }
  return {p, dp, sum};
}

// Golub-Welsch for initial nodes, Newton polish on the orthonormal p_n,
// Christoffel numbers for the weights.
void solve_rule(const Recurrence& r, std::size_t n, QuadratureRule& rule) {
  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k < n; ++k) diag[k] = r.a[k];
  for (std::size_t k = 1; k < n; ++k) sub[k - 1] = std::sqrt(r.b[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Gauss rule: eigen solve failed");
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    for (int it = 0; it < 3; ++it) {
      const OrthoEval e = evaluate(r, n, x);
      if (e.dp == 0.0) break;
      const double dx = e.p / e.dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / evaluate(r, n, x).christoffel_sum;
  }
}

Recurrence laguerre_recurrence(std::size_t n) {
  Recurrence r{std::vector<double>(n), std::vector<double>(n + 1, 0.0), 1.0};
  for (std::size_t k = 0; k < n; ++k) r.a[k] = 2.0 * static_cast<double>(k) + 1.0;
  for (std::size_t k = 1; k <= n; ++k) r.b[k] = static_cast<double>(k) * static_cast<double>(k);
  return r;
}

Recurrence legendre_recurrence(std::size_t n) {
  Recurrence r{std::vector<double>(n, 0.5), std::vector<double>(n + 1, 0.0), 1.0};
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    r.b[k] = kk * kk / (4.0 * (4.0 * kk * kk - 1.0));
  }
  return r;
}

// Jacobi weight w^alpha (1-w)^beta on [0, 1], derived from the classical
// weight (1-x)^beta (1+x)^alpha on [-1, 1].
Recurrence jacobi_recurrence(std::size_t n, double alpha, double beta) {
  const double A = beta, B = alpha;  // classical (1-x)^A (1+x)^B
  Recurrence r{std::vector<double>(n), std::vector<double>(n + 1, 0.0),
               std::exp(std::lgamma(alpha + 1) + std::lgamma(beta + 1) -
                        std::lgamma(alpha + beta + 2))};
  const double ab = A + B;
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    double ak;
    if (k == 0) {
      ak = (B - A) / (ab + 2.0);
    } else {
      ak = (B * B - A * A) / ((2 * kk + ab) * (2 * kk + ab + 2.0));
    }
    r.a[k] = 0.5 * (ak + 1.0);
  }
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    double bk;
    if (k == 1) {
      bk = 4.0 * (1.0 + A) * (1.0 + B) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double s = 2 * kk + ab;
      bk = 4.0 * kk * (kk + A) * (kk + B) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    r.b[k] = 0.25 * bk;
  }
  return r;
}

void require_nodes(std::size_t n, const char* what) {
  if (n == 0) throw InvalidArgument(std::string(what) + ": node count must be positive");
}

}  // namespace

QuadratureRule gauss_laguerre(std::size_t n) {
  require_nodes(n, "gauss_laguerre");
  QuadratureRule rule{RuleKind::laguerre, {}, {}};
  solve_rule(laguerre_recurrence(n), n, rule);
  return rule;
}

QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta) {
  require_nodes(n, "gauss_jacobi");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw InvalidArgument("gauss_jacobi: exponents must exceed -1 (got alpha=" +
                          std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
  QuadratureRule rule{RuleKind::jacobi, {}, {}, alpha, beta};
  solve_rule(jacobi_recurrence(n, alpha, beta), n, rule);
  return rule;
}

QuadratureRule gauss_legendre(std::size_t n) {
  require_nodes(n, "gauss_legendre");
  QuadratureRule rule{RuleKind::legendre, {}, {}};
  solve_rule(legendre_recurrence(n), n, rule);
  return rule;
}

const QuadratureRule& cached_rule(RuleKind kind, std::size_t n, double alpha, double beta) {
  using Key = std::tuple<int, std::size_t, double, double>;
  static std::mutex mutex;
  static std::map<Key, QuadratureRule> cache;
  const Key key{static_cast<int>(kind), n, alpha, beta};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  QuadratureRule rule = kind == RuleKind::laguerre  ? gauss_laguerre(n)
                        : kind == RuleKind::legendre ? gauss_legendre(n)
                                                     : gauss_jacobi(n, alpha, beta);
  return cache.emplace(key, std::move(rule)).first->second;
}

double laguerre_expectation(const std::function<double(double)>& f, std::size_t n_nodes) {
  const QuadratureRule& rule = cached_rule(RuleKind::laguerre, n_nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v))
      throw NumericalError("laguerre_expectation: non-finite integrand at u=" +
                           std::to_string(rule.nodes[i]));
    acc += rule.weights[i] * v;
  }
  return acc;
}

double jacobi_singular_integral(const std::function<double(double)>& g, double alpha,
                                std::size_t n_nodes) {
  if (!(alpha > -1.0))
    throw InvalidArgument("jacobi_singular_integral: alpha <= -1 is not integrable");
  return cached_rule(RuleKind::jacobi, n_nodes, alpha, 0.0).apply(g);
}

namespace {

double legendre_panel(const std::function<double(double)>& f, double a, double b,
                      const QuadratureRule& gl) {
  const double len = b - a;
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.size(); ++i) acc += gl.weights[i] * f(a + len * gl.nodes[i]);
  return acc * len;
}

// Integral over [a, b] with a singularity at a (toward_left) or b.
double one_sided(const std::function<double(double)>& f, double a, double b, EndBehavior end,
                 bool toward_left, std::size_t nodes) {
  const QuadratureRule& gl = cached_rule(RuleKind::legendre, nodes);
  const QuadratureRule& jac = cached_rule(RuleKind::jacobi, nodes, end.exponent, 0.0);
  const double len = b - a;
  auto at = [&](double dist) { return toward_left ? a + dist : b - dist; };
  // Near a nonzero endpoint the abscissae end + d are rounded, which costs
  // relative accuracy ulp(end) / d in whatever the integrand computes from d.
  // The Jacobi panel absorbs the singular factor anyway, so stop refining
  // well before that matters.
  const double scale = std::abs(toward_left ? a : b);
  int levels = end.levels;
  while (levels > 0 && std::ldexp(len, -levels) < scale * 0x1.0p-14) --levels;
  const double inner = std::ldexp(len, -levels);
  double acc = 0.0;
  for (std::size_t i = 0; i < jac.size(); ++i)
    acc += jac.weights[i] * f(at(inner * jac.nodes[i])) / std::pow(jac.nodes[i], end.exponent);
  acc *= inner;
  for (int k = levels - 1; k >= 0; --k) {
    const double lo = std::ldexp(len, -(k + 1)), hi = std::ldexp(len, -k);
    auto g = [&](double d) { return f(at(d)); };
    acc += legendre_panel(g, lo, hi, gl);
  }
  return acc;
}

}  // namespace

double graded_integral(const std::function<double(double)>& f, double a, double b,
                       EndBehavior left, EndBehavior right, std::size_t nodes) {
  if (!(b > a)) return 0.0;
  if (left.singular && right.singular) {
    const double m = 0.5 * (a + b);
    return one_sided(f, a, m, left, true, nodes) + one_sided(f, m, b, right, false, nodes);
  }
  if (left.singular) return one_sided(f, a, b, left, true, nodes);
  if (right.singular) return one_sided(f, a, b, right, false, nodes);
  return legendre_panel(f, a, b, cached_rule(RuleKind::legendre, nodes));
}

}  // namespace maldens
