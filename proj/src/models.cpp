#include "maldens/models.hpp"

#include <cmath>
#include <string>

#include "maldens/error.hpp"
#include "maldens/parallel.hpp"
#include "maldens/simd/kernels.hpp"

namespace maldens {

LinearFunctionalModel LinearFunctionalModel::constant(const TimeGrid& grid, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("linear model: sigma must be nonnegative");
  return {grid, std::vector<double>(grid.size(), sigma / std::sqrt(grid.horizon()))};
}

double LinearFunctionalModel::variance() const {
  double v = 0.0;
  for (std::size_t j = 0; j < grid.cells(); ++j) {
    const double hm = 0.5 * (h[j] + h[j + 1]);
    v += grid.cell_width(j) * hm * hm;
  }
  return v;
}

LinearEval linear_eval(const LinearFunctionalModel& model, std::span<const double> dw) {
  if (dw.size() != model.grid.cells()) throw InvalidArgument("linear_eval: increment count mismatch");
  double f = 0.0;
  for (std::size_t j = 0; j < dw.size(); ++j) f += 0.5 * (model.h[j] + model.h[j + 1]) * dw[j];
  return {f, model.h};
}

Convexity AdditiveFunctionalModel::convexity() const {
  const double k = B * kappa * kappa;
  if (k > 0.0) return Convexity::convex;
  if (k < 0.0) return Convexity::concave;
  return Convexity::neither;
}

AdditiveFunctionalModel make_additive(const std::string& preset, double c,
                                      const CovarianceModel& cov, const TimeGrid& grid) {
  if (!(c > 0.0)) throw InvalidArgument("additive model: c must be positive");
  AdditiveFunctionalModel m{preset, 1.0, 0.0, 0.0, c, cov, grid, 0.0};
  if (preset == "additive-exp") {
    m.B = 1.0;
    m.kappa = 1.0;
  } else if (preset == "additive-linear") {
    m.A = 2.0;
  } else if (preset == "additive-concave") {
    m.B = -1.0;
    m.kappa = -1.0;
  } else {
    throw InvalidArgument("unknown additive preset '" + preset + "'");
  }
  return m;
}

AdditiveEval additive_eval(const AdditiveFunctionalModel& model, std::span<const double> x) {
  const std::size_t n = model.grid.size();
  if (x.size() != n) throw InvalidArgument("additive_eval: path length mismatch");
  AdditiveEval out{0.0, std::vector<double>(n)};
  std::vector<double> fx(n);
  for (std::size_t i = 0; i < n; ++i) {
    fx[i] = model.f(x[i]);
    out.DY[i] = model.fp(x[i]);
  }
  out.Y = trapezoid(fx, model.grid) - model.centering;
  return out;
}

double estimate_centering(const AdditiveFunctionalModel& model, std::size_t n_paths,
                          std::uint64_t seed) {
  if (model.B == 0.0) return 0.0;
  if (model.kappa == 0.0) return model.B * model.grid.horizon();
  if (n_paths == 0) throw InvalidArgument("estimate_centering: n_paths must be positive");
  const PathSampler sampler(model.cov, model.grid);
  std::vector<double> integral(n_paths);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(model.grid.size()), fx(model.grid.size());
    for (std::size_t i = begin; i < end; ++i) {
      sampler.sample(seed, i, x);
      for (std::size_t k = 0; k < x.size(); ++k) fx[k] = model.f(x[k]);
      integral[i] = trapezoid(fx, model.grid);
    }
  });
  return simd::sum(integral) / static_cast<double>(n_paths);
}

FbmSdeModel make_sde_sine(double x0, double H, double T, double c, double M) {
  FbmSdeModel m;
  m.name = "sde-sine";
  m.x0 = x0;
  m.H = H;
  m.T = T;
  m.c = c;
  m.M = M;
  m.m_bound = 0.0;
  m.coef = [](double, double x) {
    const double s = 2.0 + std::sin(x), d = std::cos(x);
    return SdeCoefficients{s, s, d, 0.0, d};
  };
  return m;
}

FbmSdeModel make_sde_custom(double x0, double H, double T, double a0, double a1, double s0,
                            double s1, double c, double M, double m_bound) {
  FbmSdeModel m;
  m.name = "sde-custom";
  m.x0 = x0;
  m.H = H;
  m.T = T;
  m.c = c;
  m.M = M;
  m.m_bound = m_bound;
  m.coef = [=](double, double x) {
    return SdeCoefficients{a0 + a1 * x, s0 + s1 * std::sin(x), a1, 0.0, s1 * std::cos(x)};
  };
  return m;
}

namespace {

double m_of(const FbmSdeModel& model, const SdeCoefficients& k, double t, double x) {
  if (!(std::abs(k.sigma) >= model.c))
    throw ModelViolation("sigma(" + std::to_string(t) + ", " + std::to_string(x) + ") = " +
                         std::to_string(k.sigma) + " is below the asserted bound c = " +
                         std::to_string(model.c));
  return k.db_dx - k.b * k.dsigma_dx / k.sigma - k.dsigma_dt / k.sigma;
}

}  // namespace

double m_function(const FbmSdeModel& model, double t, double x) {
  return m_of(model, model.coef(t, x), t, x);
}

void sde_solve_from(const FbmSdeModel& model, const TimeGrid& grid, std::span<const double> bh,
                    std::size_t from, SdePath& out) {
  const std::size_t n = grid.size();
  if (bh.size() != n) throw InvalidArgument("sde_solve: fBm path length mismatch");
  out.x.resize(n);
  out.m.resize(n);
  out.sigma.resize(n);
  out.dsigma_dx.resize(n);
  for (std::size_t i = from; i < n; ++i) {
    const double t = grid[i], x = out.x[i];
    const SdeCoefficients k = model.coef(t, x);
    out.m[i] = m_of(model, k, t, x);
    out.sigma[i] = k.sigma;
    out.dsigma_dx[i] = k.dsigma_dx;
    if (i + 1 == n) break;
    const double dt = grid.cell_width(i), db = bh[i + 1] - bh[i];
    double next = x + k.b * dt + k.sigma * db;
    if (model.scheme == SdeScheme::taylor2)
      next += 0.5 * k.sigma * k.dsigma_dx * db * db +
              0.5 * (k.dsigma_dt + k.b * k.dsigma_dx + k.sigma * k.db_dx) * dt * db + 0.5 * k.b * k.db_dx * dt * dt;
    if (!std::isfinite(next))
      throw NumericalError("sde_solve: non-finite state at step " + std::to_string(i + 1));
    out.x[i + 1] = next;
  }
}

SdePath sde_solve(const FbmSdeModel& model, const KernelMatrix& km, std::span<const double> dw) {
  std::vector<double> bh(km.grid.size());
  fbm_path(km, dw, bh);
  SdePath path;
  path.x.assign(km.grid.size(), 0.0);
  path.x[0] = model.x0;
  sde_solve_from(model, km.grid, bh, 0, path);
  return path;
}

namespace {

// E_c = exp(int_{t_c}^{t_n} m) for c = j..n, stored at e[c - j].
void growth_factors(const TimeGrid& grid, const SdePath& path, std::size_t n, std::size_t j,
                    std::vector<double>& e) {
  e.resize(n - j + 1);
  e[n - j] = 1.0;
  for (std::size_t c = n; c-- > j;)
    e[c - j] = e[c + 1 - j] * std::exp(0.5 * grid.cell_width(c) * (path.m[c] + path.m[c + 1]));
}

double phi_cell(const KernelMatrix& km, std::size_t n, std::size_t j, const std::vector<double>& e) {
  double acc = 0.0;
  for (std::size_t c = j; c < n; ++c)
    acc += (km.kbar(c + 1, j) - km.kbar(c, j)) * 0.5 * (e[c - j] + e[c + 1 - j]);
  return acc;
}

}  // namespace

double sde_malliavin_derivative_cell(const KernelMatrix& km, const SdePath& path, std::size_t n,
                                     std::size_t j) {
  if (n >= km.grid.size() || j >= n) throw InvalidArgument("sde_malliavin_derivative: bad index");
  std::vector<double> e;
  growth_factors(km.grid, path, n, j, e);
  return path.sigma[n] * phi_cell(km, n, j, e);
}

std::vector<double> sde_malliavin_derivative(const KernelMatrix& km, const SdePath& path,
                                             std::size_t n) {
  if (n >= km.grid.size()) throw InvalidArgument("sde_malliavin_derivative: bad time index");
  std::vector<double> d(km.grid.cells(), 0.0);
  if (n == 0) return d;
  std::vector<double> e;
  growth_factors(km.grid, path, n, 0, e);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t c = j; c < n; ++c)
      acc += (km.kbar(c + 1, j) - km.kbar(c, j)) * 0.5 * (e[c] + e[c + 1]);
    d[j] = path.sigma[n] * acc;
  }
  return d;
}

}  // namespace maldens
