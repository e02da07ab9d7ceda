#include "maldens/malliavin.hpp"

#include <cmath>
#include <string>

#include "maldens/error.hpp"
#include "maldens/rng.hpp"
#include "maldens/simd/kernels.hpp"

namespace maldens {

double h_inner(const HElement& a, const HElement& b, const CovarianceModel& cov,
               const TimeGrid& grid) {
  const std::size_t n = grid.size();
  if (a.density.size() != n || b.density.size() != n)
    throw InvalidArgument("h_inner: element does not match the grid");
  const auto& w = grid.trapezoid_weights();
  std::vector<double> wb(n), row(n);
  for (std::size_t j = 0; j < n; ++j) wb[j] = w[j] * b.density[j];
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.density[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) row[j] = cov(grid[i], grid[j]);
    acc += w[i] * a.density[i] * simd::dot(row, wb);
  }
  return acc;
}

double h_inner_l2(const HElement& a, const HElement& b, const TimeGrid& grid) {
  const std::size_t n = grid.size();
  if (a.density.size() != n || b.density.size() != n)
    throw InvalidArgument("h_inner_l2: element does not match the grid");
  std::vector<double> ab(n);
  for (std::size_t i = 0; i < n; ++i) ab[i] = a.density[i] * b.density[i];
  return trapezoid(ab, grid);
}

namespace {

QuadratureRule mehler_rule(const MehlerConfig& cfg) {
  if (cfg.rule) return *cfg.rule;
  if (cfg.laguerre_nodes == 0) throw InvalidArgument("Mehler: laguerre_nodes must be positive");
  return cached_rule(RuleKind::laguerre, cfg.laguerre_nodes);
}

Matrix sample_copies(const AdditiveFunctionalModel& model, const MehlerConfig& cfg) {
  if (cfg.n_copies == 0) throw InvalidArgument("Mehler: n_copies must be positive");
  const PathSampler sampler(model.cov, model.grid);
  Matrix copies(cfg.n_copies, model.grid.size());
  for (std::size_t c = 0; c < cfg.n_copies; ++c) sampler.sample(cfg.copy_seed, c, copies.row(c));
  return copies;
}

}  // namespace

AdditiveEngine::AdditiveEngine(const AdditiveFunctionalModel& model, const MehlerConfig& cfg)
    : model_(model), rule_(mehler_rule(cfg)) {
  init(sample_copies(model, cfg));
}

AdditiveEngine::AdditiveEngine(const AdditiveFunctionalModel& model, const MehlerConfig& cfg,
                               const Matrix& copies)
    : model_(model), rule_(mehler_rule(cfg)) {
  init(copies);
}

void AdditiveEngine::init(const Matrix& copies) {
  const TimeGrid& grid = model_.grid;
  const std::size_t n = grid.size(), nk = rule_.size();
  if (copies.rows() == 0 || copies.cols() != n)
    throw InvalidArgument("AdditiveEngine: copies must be a non-empty n_copies x grid matrix");
  w_ = grid.trapezoid_weights();
  rw_ = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rw_(i, j) = model_.cov(grid[i], grid[j]) * w_[j];

  alpha_.resize(nk);
  copy_factor_ = Matrix(nk, n, 1.0);
  std::vector<double> arg(copies.rows()), ex(copies.rows());
  for (std::size_t k = 0; k < nk; ++k) {
    const double u = rule_.nodes[k];
    alpha_[k] = std::exp(-u);
    if (model_.is_linear()) continue;
    const double beta = std::sqrt(-std::expm1(-2.0 * u));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < copies.rows(); ++c) arg[c] = model_.kappa * beta * copies(c, i);
      simd::exp(arg, ex);
      copy_factor_(k, i) = simd::sum(ex) / static_cast<double>(copies.rows());
    }
  }
}

void AdditiveEngine::apply_rw(std::span<const double> v, std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = simd::dot(rw_.row(i), v);
}

HElement AdditiveEngine::u_density(std::span<const double> x) const {
  const std::size_t n = model_.grid.size();
  HElement psi{std::vector<double>(n, model_.A)};
  if (model_.is_linear()) return psi;
  const double bk = model_.B * model_.kappa;
  std::vector<double> terms(rule_.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rule_.size(); ++k)
      terms[k] = rule_.weights[k] * simd::exp1(model_.kappa * alpha_[k] * x[i]) * copy_factor_(k, i);
    psi.density[i] = model_.A + bk * simd::sum(terms);
  }
  return psi;
}

std::vector<double> AdditiveEngine::second_order_factor(std::span<const double> x) const {
  const std::size_t n = model_.grid.size();
  std::vector<double> chi(n, 0.0);
  if (model_.is_linear()) return chi;
  const double bkk = model_.B * model_.kappa * model_.kappa;
  std::vector<double> terms(rule_.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rule_.size(); ++k)
      terms[k] = rule_.weights[k] * alpha_[k] * simd::exp1(model_.kappa * alpha_[k] * x[i]) *
                 copy_factor_(k, i);
    chi[i] = bkk * simd::sum(terms);
  }
  return chi;
}

AdditiveSample AdditiveEngine::evaluate(std::span<const double> x) const {
  const std::size_t n = model_.grid.size();
  if (x.size() != n) throw InvalidArgument("AdditiveEngine: path length mismatch");
  const AdditiveEval ev = additive_eval(model_, x);
  const HElement psi = u_density(x);

  AdditiveSample s{ev.Y, 0.0, 0.0, std::abs(ev.DY[0])};
  for (double a : ev.DY) s.min_fp = std::min(s.min_fp, std::abs(a));

  std::vector<double> r_psi(n), tmp(n);
  apply_rw(psi.density, r_psi);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = w_[i] * ev.DY[i];
  s.G = simd::dot(tmp, r_psi);
  if (!(std::abs(s.G) >= kDegenerateG))
    throw ModelViolation("degenerate sample: |G| = " + std::to_string(std::abs(s.G)) +
                         " is below 1e-10");
  if (model_.is_linear()) return s;

  // Density of DG: f''(X_r) (R psi)(r) + chi(r) (R a)(r).
  const std::vector<double> chi = second_order_factor(x);
  std::vector<double> r_a(n);
  apply_rw(ev.DY, r_a);
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = w_[i] * (model_.fpp(x[i]) * r_psi[i] + chi[i] * r_a[i]);
  s.h = simd::dot(tmp, r_psi) / (s.G * s.G);
  return s;
}

HElement mehler_u_density(const AdditiveFunctionalModel& model, std::span<const double> x,
                          const PathSet& copies, const MehlerConfig& cfg) {
  return AdditiveEngine(model, cfg, copies.paths).u_density(x);
}

double g_sample_additive(const AdditiveFunctionalModel& model, std::span<const double> x,
                         const PathSet& copies, const MehlerConfig& cfg) {
  return AdditiveEngine(model, cfg, copies.paths).evaluate(x).G;
}

double h_term_additive(const AdditiveFunctionalModel& model, std::span<const double> x,
                       const PathSet& copies, const MehlerConfig& cfg) {
  return AdditiveEngine(model, cfg, copies.paths).evaluate(x).h;
}

void path_increments(const TimeGrid& grid, std::uint64_t seed, std::uint64_t index,
                     std::span<double> dw) {
  if (dw.size() != grid.cells()) throw InvalidArgument("path_increments: size mismatch");
  NormalStream s(seed, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32));
  for (std::size_t j = 0; j < dw.size(); ++j) dw[j] = std::sqrt(grid.cell_width(j)) * s.normal();
}

Matrix sample_increments(const TimeGrid& grid, std::size_t n, std::uint64_t seed) {
  Matrix dw(n, grid.cells());
  for (std::size_t i = 0; i < n; ++i) path_increments(grid, seed, i, dw.row(i));
  return dw;
}

double g_sample_sde(const FbmSdeModel& model, const KernelMatrix& km, std::span<const double> dw,
                    const Matrix& copies_dw, const MehlerConfig& cfg, std::size_t n) {
  const TimeGrid& grid = km.grid;
  if (copies_dw.rows() == 0 || copies_dw.cols() != grid.cells())
    throw InvalidArgument("g_sample_sde: copies must be n_copies x cells");
  const QuadratureRule rule = mehler_rule(cfg);
  const std::vector<double> d = sde_malliavin_derivative(km, sde_solve(model, km, dw), n);

  std::vector<double> avg(grid.cells(), 0.0), mixed(grid.cells());
  const double inv_copies = 1.0 / static_cast<double>(copies_dw.rows());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double u = rule.nodes[k];
    const double a = std::exp(-u), b = std::sqrt(-std::expm1(-2.0 * u));
    std::vector<double> node_sum(grid.cells(), 0.0);
    for (std::size_t c = 0; c < copies_dw.rows(); ++c) {
      simd::affine(a, dw, b, copies_dw.row(c), mixed);
      const auto dm = sde_malliavin_derivative(km, sde_solve(model, km, mixed), n);
      for (std::size_t j = 0; j < n; ++j) node_sum[j] += dm[j];
    }
    for (std::size_t j = 0; j < n; ++j) avg[j] += rule.weights[k] * node_sum[j] * inv_copies;
  }
  double g = 0.0;
  for (std::size_t j = 0; j < n; ++j) g += grid.cell_width(j) * d[j] * avg[j];
  if (!(std::abs(g) >= kDegenerateG))
    throw ModelViolation("degenerate sample: |G| = " + std::to_string(std::abs(g)));
  return g;
}

PhiSample phi_clark_ocone(const FbmSdeModel& model, const KernelMatrix& km,
                          std::span<const double> dw, std::size_t n, const NestedConfig& cfg,
                          std::uint64_t path_index, const FutureSource& future) {
  const TimeGrid& grid = km.grid;
  const std::size_t cells = grid.cells();
  if (dw.size() != cells) throw InvalidArgument("phi_clark_ocone: increment count mismatch");
  if (n == 0 || n >= grid.size()) throw InvalidArgument("phi_clark_ocone: bad time index");
  if (cfg.n_sub == 0) throw InvalidArgument("phi_clark_ocone: n_sub must be positive");

  const SdePath path = sde_solve(model, km, dw);
  PhiSample out{0.0, 0.0, sde_malliavin_derivative(km, path, n)};

  // past(i, j) = sum_{k<j} kbar(i, k) dW_k: the part of B^H(t_i) fixed by F_{t_j}.
  Matrix past(n + 1, n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      past(i, j) = acc;
      if (j < i) acc += km.kbar(i, j) * dw[j];
    }
  }

  std::vector<double> fut(cells), bh(grid.size(), 0.0), samples(cfg.n_sub);
  SdePath sub = path;
  double var_acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    NormalStream stream(cfg.sub_seed, static_cast<std::uint32_t>(path_index),
                        static_cast<std::uint32_t>(j));
    for (std::size_t r = 0; r < cfg.n_sub; ++r) {
      std::span<double> f(fut.data() + j, n - j);
      if (future) {
        future(j, r, f);
      } else {
        for (std::size_t k = 0; k < f.size(); ++k)
          f[k] = std::sqrt(grid.cell_width(j + k)) * stream.normal();
      }
      bh[j] = past(j, j);
      for (std::size_t i = j + 1; i <= n; ++i)
        bh[i] = past(i, j) + simd::dot(km.kbar.row(i).subspan(j, i - j), f.first(i - j));
      for (std::size_t i = n + 1; i < grid.size(); ++i) bh[i] = bh[n];
      sub.x[j] = path.x[j];
      sde_solve_from(model, grid, std::span<const double>(bh.data(), grid.size()), j, sub);
      samples[r] = sde_malliavin_derivative_cell(km, sub, n, j);
    }
    const double mean = simd::sum(samples) / static_cast<double>(cfg.n_sub);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double var = cfg.n_sub > 1 ? ss / static_cast<double>(cfg.n_sub - 1) : 0.0;
    const double wd = grid.cell_width(j) * out.d[j];
    out.phi += wd * mean;
    var_acc += wd * wd * var / static_cast<double>(cfg.n_sub);
  }
  out.se = std::sqrt(var_acc);
  if (!(std::abs(out.phi) >= kDegenerateG))
    throw ModelViolation("degenerate sample: |Phi| = " + std::to_string(std::abs(out.phi)));
  return out;
}

double sde_h_bound(const FbmSdeModel& model) {
  if (!(model.c > 0.0)) throw InvalidArgument("sde_h_bound: c must be positive");
  return 2.0 * model.M * (1.0 + model.T) * std::exp(2.0 * model.M * model.T) / model.c;
}

}  // namespace maldens
