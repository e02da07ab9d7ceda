#include "maldens/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <type_traits>

#include "maldens/gaussian_process.hpp"
#include "maldens/malliavin.hpp"
#include "maldens/models.hpp"
#include "maldens/parallel.hpp"
#include "maldens/rng.hpp"
#include "maldens/simd/kernels.hpp"
#include "maldens/volterra.hpp"

namespace maldens {
namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kPresets = {"linear",         "additive-exp", "additive-linear",
                                           "additive-concave", "sde-sine",   "sde-custom"};

// One copy pool serves every path, so its error does not average out over
// paths; with the factorized engine a large pool costs one pass.
constexpr std::size_t kAdditiveCopies = 65536;

bool is_additive(const std::string& p) { return p.rfind("additive-", 0) == 0; }
bool is_sde(const std::string& p) { return p.rfind("sde-", 0) == 0; }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string path = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(path + ": expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError(path + ": expected a nonnegative integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    out = v.get<double>();
  }
}

void read_opt(const json& j, const char* key, std::optional<double>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  double v = 0.0;
  read(j, key, v, where);
  out = v;
}

void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  need(c.T > 0.0 && std::isfinite(c.T), "grid.T must be positive");
  need(c.n_points >= 3, "grid.n_points must be at least 3");
  need(c.n_paths >= 2, "n_paths must be at least 2");
  need(c.kde_paths == 0 || c.kde_paths >= 2, "kde_paths must be at least 2");
  need(c.centering_multiplier >= 1, "centering_multiplier must be positive");
  need(c.sigma > 0.0, "model.sigma must be positive");
  need(c.c > 0.0, "model.c must be positive");
  need(c.M >= 0.0 && c.m_bound >= 0.0, "model.M and model.m_bound must be nonnegative");
  if (c.fbm_H) need(*c.fbm_H > 0.0 && *c.fbm_H < 1.0, "model.covariance.fbm must lie in (0, 1)");
  if (is_sde(c.preset)) need(c.H > 0.5 && c.H < 1.0, "model.H must lie in (1/2, 1)");
  need(c.scheme == "euler" || c.scheme == "taylor2", "model.scheme must be \"euler\" or \"taylor2\"");
  need(c.laguerre_nodes >= 1 && c.n_copies >= 1, "mehler counts must be positive");
  need(c.n_sub >= 1, "nested.n_sub must be positive");
  need(c.x_points >= 3, "x_grid.n must be at least 3");
  if (c.x_min) need(*c.x_min <= 0.0, "x_grid.min must be <= 0 (the grid is anchored at 0)");
  if (c.x_max) need(*c.x_max >= 0.0, "x_grid.max must be >= 0 (the grid is anchored at 0)");
  need(c.slack >= 0.0, "envelope.slack must be nonnegative");
  need(c.check_points >= 1, "envelope.check.n must be positive");
  need(c.check_central > 0.0 && c.check_central < 1.0, "envelope.check.central must lie in (0, 1)");
  need(c.check_min.has_value() == c.check_max.has_value(), "envelope.check needs both min and max");
  if (c.check_min) need(*c.check_min <= *c.check_max, "envelope.check.min exceeds max");
  if (c.bandwidth) need(*c.bandwidth > 0.0, "regression.bandwidth must be positive");
  need(c.min_neff >= 0.0, "regression.min_neff must be nonnegative");
}

std::vector<double> anchored_grid(double lo, double hi, std::size_t n) {
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  if (!(dx > 0.0) || !std::isfinite(dx)) throw DegenerateData("x grid: samples have no spread");
  const auto k0 = static_cast<long long>(std::floor(lo / dx));
  const auto k1 = static_cast<long long>(std::ceil(hi / dx));
  std::vector<double> x;
  for (long long k = std::min(k0, 0LL); k <= std::max(k1, 0LL); ++k) x.push_back(static_cast<double>(k) * dx);
  return x;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n == 1) return {a};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

double mean_of(std::span<const double> v) { return simd::sum(v) / static_cast<double>(v.size()); }

double sd_of(std::span<const double> v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Stopwatch {
 public:
  explicit Stopwatch(ExperimentReport& r) : r_(r), t0_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& phase) {
    const auto t = std::chrono::steady_clock::now();
    r_.timing.emplace_back(phase, std::chrono::duration<double>(t - t0_).count());
    t0_ = t;
  }

 private:
  ExperimentReport& r_;
  std::chrono::steady_clock::time_point t0_;
};

struct Seeds {
  std::uint64_t paths, copies, centering, nested;
  explicit Seeds(std::uint64_t s)
      : paths(mix_seed(s, stream_tag::paths)),
        copies(mix_seed(s, stream_tag::copies)),
        centering(mix_seed(s, stream_tag::centering)),
        nested(mix_seed(s, stream_tag::nested)) {}
};

// Samples for the linear preset: F = sum h dW, G = ||h||^2, h-term 0.
void linear_samples(const ExperimentConfig& cfg, ExperimentReport& r, BoundCertificate& cert) {
  const TimeGrid grid = uniform_grid(cfg.T, cfg.n_points);
  const auto model = LinearFunctionalModel::constant(grid, cfg.sigma);
  const Seeds seeds(cfg.seed);
  const std::size_t n = cfg.n_paths, nk = std::max(n, cfg.kde_sample_count());
  std::vector<double> f(nk);
  parallel_for(nk, [&](std::size_t b, std::size_t e) {
    std::vector<double> dw(grid.cells());
    for (std::size_t i = b; i < e; ++i) {
      path_increments(grid, seeds.paths, i, dw);
      f[i] = linear_eval(model, dw).F;
    }
  });
  const double var = model.variance();
  r.samples.F.assign(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(n));
  r.samples.G.assign(n, var);
  r.samples.h.assign(n, 0.0);
  r.kde_samples.assign(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(cfg.kde_sample_count()));

  r.audits.declare("G_nonzero", "|G_F| >= 1e-10 on every path");
  r.audits.declare("G_floor", "G_F >= sigma_min^2 on every path");
  for (double g : r.samples.G) {
    r.audits.observe("G_nonzero", std::abs(g) - kDegenerateG);
    r.audits.observe("G_floor", g - var * (1.0 - 1e-12));
  }
  cert.sigma_min_sq = var;
  cert.sigma_max_sq = var;
  cert.m1 = 0.0;
  cert.m2 = 0.0;
  r.diagnostics["sigma_sq"] = var;
}

void additive_samples(const ExperimentConfig& cfg, ExperimentReport& r, BoundCertificate& cert,
                      Stopwatch& watch) {
  const TimeGrid grid = uniform_grid(cfg.T, cfg.n_points);
  const CovarianceModel cov = cfg.fbm_H ? CovarianceModel::fbm(*cfg.fbm_H) : CovarianceModel::brownian();
  AdditiveFunctionalModel model = make_additive(cfg.preset, cfg.c, cov, grid);
  const Seeds seeds(cfg.seed);
  const std::size_t n = cfg.n_paths, nk = std::max(n, cfg.kde_sample_count());

  model.centering = estimate_centering(model, cfg.centering_multiplier * nk, seeds.centering);
  watch.lap("centering");
  const AdditiveEngine engine(model, MehlerConfig{cfg.laguerre_nodes, cfg.n_copies, seeds.copies, {}});
  const PathSampler sampler(cov, grid);
  const Convexity convexity = model.convexity();
  const double sign = convexity == Convexity::convex ? 1.0 : -1.0;

  std::vector<double> y(nk), g(n), h(n), min_fp(n);
  std::vector<AuditTally> fpp(n);
  parallel_for(nk, [&](std::size_t b, std::size_t e) {
    std::vector<double> x(grid.size());
    for (std::size_t i = b; i < e; ++i) {
      sampler.sample(seeds.paths, i, x);
      if (i >= n) {
        y[i] = additive_eval(model, x).Y;
        continue;
      }
      const AdditiveSample s = engine.evaluate(x);
      y[i] = s.Y;
      g[i] = s.G;
      h[i] = s.h;
      min_fp[i] = s.min_fp;
      if (convexity != Convexity::neither)
        for (double v : x) fpp[i].observe(sign * model.fpp(v));
    }
  });
  watch.lap("samples");

  const SigmaT st = sigma_T_squared(cov, grid);
  const double floor = cfg.c * cfg.c * st.sigma2;
  r.samples.F.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  r.samples.G = g;
  r.samples.h = h;
  r.kde_samples.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(cfg.kde_sample_count()));

  auto& a = r.audits;
  a.declare("R_nonneg", "E[X_s X_v] >= 0 at every pair of grid times");
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) a.observe("R_nonneg", cov(grid[i], grid[j]));
  a.declare("fprime_floor", "|f'(X_s)| >= c at every evaluated point");
  for (double v : min_fp) a.observe("fprime_floor", v - cfg.c);
  if (convexity != Convexity::neither) {
    a.declare("fpp_sign", std::string("f'' has the declared sign (") +
                              (convexity == Convexity::convex ? "convex" : "concave") + ") at every evaluated point");
    a.merge("fpp_sign", fpp);
  }
  a.declare("G_nonzero", "|G_F| >= 1e-10 on every path");
  a.declare("G_floor", "G_F >= c^2 sigma_T^2 on every path");
  for (double v : g) {
    a.observe("G_nonzero", std::abs(v) - kDegenerateG);
    a.observe("G_floor", v - floor * (1.0 - 1e-12));
  }
  if (convexity != Convexity::neither) {
    const double se = sd_of(h) / std::sqrt(static_cast<double>(n));
    a.declare("h_sign", std::string(convexity == Convexity::convex ? "h >= -3 SE" : "h <= 3 SE") +
                            " on every path, SE = sd(h) / sqrt(n)");
    for (double v : h) a.observe("h_sign", sign * v + 3.0 * se);
    r.diagnostics["h_se"] = se;
  }

  cert.sigma_min_sq = floor;
  if (convexity != Convexity::concave) cert.m1 = 0.0;
  if (convexity != Convexity::convex) cert.m2 = 0.0;
  r.diagnostics["sigma_T2"] = st.sigma2;
  r.diagnostics["centering"] = model.centering;
  r.diagnostics["covariance"] = cov.name();
}

void sde_samples(const ExperimentConfig& cfg, ExperimentReport& r, BoundCertificate& cert,
                 Stopwatch& watch) {
  FbmSdeModel model =
      cfg.preset == "sde-sine"
          ? make_sde_sine(cfg.x0, cfg.H, cfg.T, cfg.c, cfg.M)
          : make_sde_custom(cfg.x0, cfg.H, cfg.T, cfg.a0, cfg.a1, cfg.s0, cfg.s1, cfg.c, cfg.M, cfg.m_bound);
  model.scheme = cfg.scheme == "euler" ? SdeScheme::euler : SdeScheme::taylor2;
  const double m_bound = model.m_bound;
  const TimeGrid grid = uniform_grid(cfg.T, cfg.n_points);
  const VolterraKernel kernel(cfg.H);
  const auto km = kernel_matrix(kernel, grid);
  const Seeds seeds(cfg.seed);
  const std::size_t n = cfg.n_paths, nk = std::max(n, cfg.kde_sample_count());
  const std::size_t last = grid.size() - 1;
  watch.lap("kernel");

  // Centering pre-pass for E[X_T].
  const std::size_t nc = cfg.centering_multiplier * nk;
  std::vector<double> xt(nc);
  parallel_for(nc, [&](std::size_t b, std::size_t e) {
    std::vector<double> dw(grid.cells());
    for (std::size_t i = b; i < e; ++i) {
      path_increments(grid, seeds.centering, i, dw);
      xt[i] = sde_solve(model, *km, dw).x[last];
    }
  });
  const double mean_xt = mean_of(xt);
  watch.lap("centering");

  std::optional<Matrix> copies;
  if (cfg.sde_mehler) copies = sample_increments(grid, cfg.n_copies, seeds.copies);
  const MehlerConfig mcfg{cfg.laguerre_nodes, cfg.n_copies, seeds.copies, {}};

  std::vector<double> f(nk), phi(n), se(n), gm(cfg.sde_mehler ? n : 0);
  std::vector<AuditTally> sig(n), mb(n), bigm(n);
  parallel_for(nk, [&](std::size_t b, std::size_t e) {
    std::vector<double> dw(grid.cells());
    for (std::size_t i = b; i < e; ++i) {
      path_increments(grid, seeds.paths, i, dw);
      const SdePath path = sde_solve(model, *km, dw);
      f[i] = path.x[last] - mean_xt;
      if (i >= n) continue;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k], x = path.x[k];
        sig[i].observe(std::abs(path.sigma[k]) - model.c);
        mb[i].observe(m_bound + 1e-12 - std::abs(path.m[k]));
        const double step = 1e-6 * std::max(1.0, std::abs(x));
        const double dm = (m_function(model, t, x + step) - m_function(model, t, x - step)) / (2.0 * step);
        const double worst = std::max({std::abs(path.m[k]), std::abs(path.dsigma_dx[k]),
                                       std::abs(dm * path.sigma[k]) - 1e-9});
        bigm[i].observe(model.M - worst);
      }
      const PhiSample p = phi_clark_ocone(model, *km, dw, last, NestedConfig{cfg.n_sub, seeds.nested}, i);
      phi[i] = p.phi;
      se[i] = p.se;
      if (copies) gm[i] = g_sample_sde(model, *km, dw, *copies, mcfg, last);
    }
  });
  watch.lap("samples");

  const double t2h = std::pow(cfg.T, 2.0 * cfg.H);
  const double floor = cfg.c * cfg.c * std::exp(-2.0 * m_bound * cfg.T) * t2h;
  r.samples.F.assign(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(n));
  r.samples.G = phi;
  r.phi_se = se;
  r.kde_samples.assign(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(cfg.kde_sample_count()));
  if (cfg.sde_mehler) r.diagnostics["mehler_G_mean"] = mean_of(gm);

  auto& a = r.audits;
  a.declare("sigma_floor", "|sigma(t, X_t)| >= c at every grid point");
  a.merge("sigma_floor", sig);
  a.declare("m_bound", "|m(t, X_t)| <= m_bound at every grid point");
  a.merge("m_bound", mb);
  a.declare("M_bound", "|m|, |sigma'_x| and |m'_x sigma| <= M at every grid point");
  a.merge("M_bound", bigm);
  a.declare("Phi_nonzero", "|Phi_F| >= 1e-10 on every path");
  a.declare("Phi_floor", "Phi_F >= c^2 exp(-2 m_bound T) T^{2H} - 3 SE_nested on every path");
  for (std::size_t i = 0; i < n; ++i) {
    a.observe("Phi_nonzero", std::abs(phi[i]) - kDegenerateG);
    a.observe("Phi_floor", phi[i] - (floor - 3.0 * se[i]));
  }

  cert.sigma_min_sq = floor;
  cert.M_h = sde_h_bound(model);
  r.diagnostics["c_H"] = kernel.c_h();
  r.diagnostics["t_2H"] = t2h;
  r.diagnostics["mean_X_T"] = mean_xt;
  r.diagnostics["M_h"] = *cert.M_h;
  r.diagnostics["m_bound"] = m_bound;
  // Copies for the optional Mehler G are part of the sample set only through diagnostics.
  if (cfg.sde_mehler) r.samples.h.clear();
}

json density_json(const DensityEstimate& d, const ReconstructionInfo* info) {
  json j;
  j["method"] = d.method;
  j["mass"] = number(d.mass);
  if (info) {
    j["clamped_points"] = info->clamped;
    j["flagged_points"] = info->flagged;
  }
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& preset) {
  ExperimentConfig c;
  c.preset = preset;
  if (preset == "linear") {
    c.n_paths = 50000;
    c.check_central = 0.95;
  } else if (preset == "additive-exp") {
    c.n_paths = 10000;
    c.n_copies = kAdditiveCopies;
    c.kde_paths = 100000;
    c.check_min = -2.0;
    c.check_max = 0.0;
    c.check_points = 21;
  } else if (preset == "additive-concave") {
    c.n_paths = 10000;
    c.n_copies = kAdditiveCopies;
    c.kde_paths = 100000;
    c.check_min = 0.0;
    c.check_max = 2.0;
    c.check_points = 21;
  } else if (preset == "additive-linear") {
    c.n_paths = 20000;
    c.n_copies = kAdditiveCopies;
  } else if (preset == "sde-sine") {
    c.n_paths = 2000;
    c.kde_paths = 20000;
  } else if (preset == "sde-custom") {
    c.n_paths = 2000;
    c.kde_paths = 20000;
    c.c = 1.5;
    c.m_bound = 0.34;
  } else {
    throw ConfigError("unknown preset '" + preset + "'");
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  only_keys(j, "config",
            {"schema_version", "preset", "seed", "grid", "n_paths", "kde_paths", "centering_multiplier",
             "model", "mehler", "nested", "sde_mehler", "x_grid", "envelope", "regression"});
  if (!j.contains("schema_version")) throw ConfigError("config.schema_version is required");
  int version = 0;
  read(j, "schema_version", version, "config");
  if (version != kSchemaVersion)
    throw ConfigError("config.schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
  if (!j.contains("preset")) throw ConfigError("config.preset is required");
  std::string preset;
  read(j, "preset", preset, "config");
  ExperimentConfig c = defaults(preset);
  if (!j.contains("seed")) throw ConfigError("config.seed is required");
  read(j, "seed", c.seed, "config");
  read(j, "n_paths", c.n_paths, "config");
  read(j, "kde_paths", c.kde_paths, "config");
  read(j, "centering_multiplier", c.centering_multiplier, "config");
  read(j, "sde_mehler", c.sde_mehler, "config");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    only_keys(g, "config.grid", {"T", "n_points"});
    read(g, "T", c.T, "config.grid");
    read(g, "n_points", c.n_points, "config.grid");
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    only_keys(m, "config.model",
              {"sigma", "c", "covariance", "x0", "H", "M", "m_bound", "a0", "a1", "s0", "s1", "scheme"});
    read(m, "scheme", c.scheme, "config.model");
    for (auto [key, dst] : std::initializer_list<std::pair<const char*, double*>>{{"sigma", &c.sigma}, {"c", &c.c}, {"x0", &c.x0}, {"H", &c.H},
                            {"M", &c.M}, {"m_bound", &c.m_bound}, {"a0", &c.a0}, {"a1", &c.a1},
                            {"s0", &c.s0}, {"s1", &c.s1}})
      read(m, key, *dst, "config.model");
    if (m.contains("covariance")) {
      const json& cv = m["covariance"];
      if (cv.is_string() && cv.get<std::string>() == "brownian") {
        c.fbm_H.reset();
      } else if (cv.is_object()) {
        only_keys(cv, "config.model.covariance", {"fbm"});
        read_opt(cv, "fbm", c.fbm_H, "config.model.covariance");
        if (!c.fbm_H) throw ConfigError("config.model.covariance: expected {\"fbm\": H}");
      } else {
        throw ConfigError("config.model.covariance: expected \"brownian\" or {\"fbm\": H}");
      }
    }
  }
  if (j.contains("mehler")) {
    only_keys(j["mehler"], "config.mehler", {"laguerre_nodes", "n_copies"});
    read(j["mehler"], "laguerre_nodes", c.laguerre_nodes, "config.mehler");
    read(j["mehler"], "n_copies", c.n_copies, "config.mehler");
  }
  if (j.contains("nested")) {
    only_keys(j["nested"], "config.nested", {"n_sub"});
    read(j["nested"], "n_sub", c.n_sub, "config.nested");
  }
  if (j.contains("x_grid")) {
    const json& x = j["x_grid"];
    only_keys(x, "config.x_grid", {"n", "min", "max"});
    read(x, "n", c.x_points, "config.x_grid");
    read_opt(x, "min", c.x_min, "config.x_grid");
    read_opt(x, "max", c.x_max, "config.x_grid");
  }
  if (j.contains("envelope")) {
    const json& e = j["envelope"];
    only_keys(e, "config.envelope", {"slack", "check"});
    read(e, "slack", c.slack, "config.envelope");
    if (e.contains("check")) {
      const json& ch = e["check"];
      only_keys(ch, "config.envelope.check", {"min", "max", "central", "n"});
      if (ch.contains("central")) {
        c.check_min.reset();
        c.check_max.reset();
        read(ch, "central", c.check_central, "config.envelope.check");
      }
      read_opt(ch, "min", c.check_min, "config.envelope.check");
      read_opt(ch, "max", c.check_max, "config.envelope.check");
      read(ch, "n", c.check_points, "config.envelope.check");
    }
  }
  if (j.contains("regression")) {
    const json& rg = j["regression"];
    only_keys(rg, "config.regression", {"bandwidth", "min_neff"});
    read_opt(rg, "bandwidth", c.bandwidth, "config.regression");
    read(rg, "min_neff", c.min_neff, "config.regression");
  }
  validate(c);
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["preset"] = preset;
  j["seed"] = seed;
  j["grid"] = {{"T", T}, {"n_points", n_points}};
  j["n_paths"] = n_paths;
  j["kde_paths"] = kde_sample_count();
  j["centering_multiplier"] = centering_multiplier;
  json m;
  if (preset == "linear") {
    m["sigma"] = sigma;
  } else if (is_additive(preset)) {
    m["c"] = c;
    m["covariance"] = fbm_H ? json{{"fbm", *fbm_H}} : json("brownian");
  } else {
    m["c"] = c;
    m["x0"] = x0;
    m["H"] = H;
    m["M"] = M;
    m["scheme"] = scheme;
    if (preset == "sde-custom") {
      m["m_bound"] = m_bound;
      m["a0"] = a0;
      m["a1"] = a1;
      m["s0"] = s0;
      m["s1"] = s1;
    }
  }
  j["model"] = m;
  if (is_additive(preset) || sde_mehler)
    j["mehler"] = {{"laguerre_nodes", laguerre_nodes}, {"n_copies", n_copies}};
  if (is_sde(preset)) {
    j["nested"] = {{"n_sub", n_sub}};
    j["sde_mehler"] = sde_mehler;
  }
  json xg{{"n", x_points}};
  if (x_min) xg["min"] = *x_min;
  if (x_max) xg["max"] = *x_max;
  j["x_grid"] = xg;
  json check;
  if (check_min) {
    check = {{"min", *check_min}, {"max", *check_max}, {"n", check_points}};
  } else {
    check = {{"central", check_central}, {"n", check_points}};
  }
  j["envelope"] = {{"slack", slack}, {"check", check}};
  json rg{{"min_neff", min_neff}};
  if (bandwidth) rg["bandwidth"] = *bandwidth;
  j["regression"] = rg;
  return j;
}

const std::vector<std::string>& preset_names() { return kPresets; }

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

const DensityEstimate* ExperimentReport::density(const std::string& method) const {
  for (const auto& d : densities)
    if (d.method == method) return &d;
  return nullptr;
}

int ExperimentReport::exit_status() const {
  if (!audits.all_pass()) return 3;
  if (!violations.pass()) return 2;
  return 0;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport r;
  r.config = cfg;
  Stopwatch watch(r);
  const auto total0 = std::chrono::steady_clock::now();
  BoundCertificate cert;

  if (cfg.preset == "linear") {
    linear_samples(cfg, r, cert);
    watch.lap("samples");
  } else if (is_additive(cfg.preset)) {
    additive_samples(cfg, r, cert, watch);
  } else if (is_sde(cfg.preset)) {
    sde_samples(cfg, r, cert, watch);
  } else {
    throw ConfigError("unknown preset '" + cfg.preset + "'");
  }

  const FunctionalSamples& s = r.samples;
  const auto [fmin, fmax] = std::minmax_element(s.F.begin(), s.F.end());
  r.x_grid = anchored_grid(cfg.x_min.value_or(std::min(*fmin, 0.0)), cfg.x_max.value_or(std::max(*fmax, 0.0)),
                           cfg.x_points);
  TrustPolicy trust;
  trust.min_effective = cfg.min_neff;
  trust.lo = empirical_quantile(s.F, 0.005);
  trust.hi = empirical_quantile(s.F, 0.995);
  const double bw = cfg.bandwidth.value_or(silverman_bandwidth(s.F));
  const double kde_bw = silverman_bandwidth(r.kde_samples);

  json dens = json::array();
  if (is_sde(cfg.preset)) {
    ReconstructionInfo info;
    r.densities.push_back(density_nourdin_viens(s, r.x_grid, bw, trust, std::nullopt, &info, "clark_ocone"));
    dens.push_back(density_json(r.densities.back(), &info));
    cert.e_abs_f = info.e_abs_f;
  } else {
    ReconstructionInfo nv, nr;
    r.densities.push_back(density_nourdin_viens(s, r.x_grid, bw, trust, std::nullopt, &nv));
    dens.push_back(density_json(r.densities.back(), &nv));
    r.densities.push_back(density_new_representation(s, r.x_grid, bw, trust, &nr));
    dens.push_back(density_json(r.densities.back(), &nr));
    cert.e_abs_f = nv.e_abs_f;

    // Each point uses the tail that holds fewer samples.
    const std::vector<double> delta = s.delta();
    const double pivot = empirical_quantile(s.F, 0.5);
    r.indicator.resize(r.x_grid.size());
    DensityEstimate ind{"indicator", r.x_grid, std::vector<double>(r.x_grid.size()), 0.0};
    std::size_t negative = 0;
    for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
      const double x = r.x_grid[i];
      r.indicator[i] = x < pivot ? indicator_density_lower(s.F, delta, x) : indicator_density(s.F, delta, x);
      negative += r.indicator[i].value < 0.0;
      ind.values[i] = std::max(r.indicator[i].value, 0.0);
    }
    ind.mass = trapezoid_mass(ind.x_grid, ind.values);
    r.densities.push_back(std::move(ind));
    dens.push_back(density_json(r.densities.back(), nullptr));
    dens.back()["negative_points"] = negative;
    dens.back()["pivot"] = pivot;
  }
  r.densities.push_back(kde_density(r.kde_samples, r.x_grid, kde_bw));
  dens.push_back(density_json(r.densities.back(), nullptr));
  watch.lap("densities");

  const double rho0 = kde_density(r.kde_samples, std::vector<double>{0.0}, kde_bw).values[0];
  cert.rho0 = rho0;

  if (cfg.check_min) {
    r.check_grid = linspace(*cfg.check_min, *cfg.check_max, cfg.check_points);
  } else {
    const double tail = 0.5 * (1.0 - cfg.check_central);
    r.check_grid = linspace(empirical_quantile(r.kde_samples, tail), empirical_quantile(r.kde_samples, 1.0 - tail),
                            cfg.check_points);
  }
  r.check_density = kde_density(r.kde_samples, r.check_grid, kde_bw).values;

  if (r.audits.all_pass()) {
    r.certificate = cert;
    r.envelopes = gaussian_envelopes(cert, r.x_grid);
    r.check_envelopes = gaussian_envelopes(cert, r.check_grid);
    const std::vector<double> upper = r.check_envelopes->has_upper ? r.check_envelopes->upper : std::vector<double>{};
    r.violations = check_envelope(r.check_grid, r.check_density, r.check_envelopes->lower, upper, cfg.slack);
  }
  watch.lap("envelopes");
  r.timing.emplace_back("total", std::chrono::duration<double>(std::chrono::steady_clock::now() - total0).count());

  json& d = r.diagnostics;
  d["bandwidth"] = {{"regression", bw}, {"kde", kde_bw}};
  d["reporting_range"] = {trust.lo, trust.hi};
  d["rho0_kde"] = rho0;
  d["e_abs_f"] = number(cert.e_abs_f.value_or(NAN));
  d["densities"] = dens;
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& p) {
  out.close();
  if (!out) throw IoError("write failed for " + p.string());
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

json audits_json(const AuditLog& log) {
  json a = json::array();
  for (const auto& r : log.records())
    a.push_back({{"id", r.id},
                 {"description", r.description},
                 {"checked", r.tally.checked},
                 {"violations", r.tally.violations},
                 {"worst_margin", r.tally.checked ? number(r.tally.worst_margin) : json(nullptr)},
                 {"pass", r.pass()}});
  return a;
}

json certificate_json(const std::optional<BoundCertificate>& c) {
  if (!c) return nullptr;
  auto opt = [](const std::optional<double>& v) { return v ? number(*v) : json(nullptr); };
  return {{"sigma_min_sq", c->sigma_min_sq}, {"sigma_max_sq", opt(c->sigma_max_sq)},
          {"m1", opt(c->m1)},                {"m2", opt(c->m2)},
          {"M_h", opt(c->M_h)},              {"rho0", c->rho0},
          {"E_abs_F", opt(c->e_abs_f)}};
}

}  // namespace

void emit_outputs(const ExperimentReport& r, const std::filesystem::path& dir) {
  make_dir(dir);
  {
    const auto p = dir / "density.csv";
    auto out = open_out(p);
    out << "x";
    for (const auto& d : r.densities) out << ',' << d.method;
    out << ",lower_env,upper_env\n";
    for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
      out << format_double(r.x_grid[i]);
      for (const auto& d : r.densities) out << ',' << format_double(d.values[i]);
      out << ',' << format_double(r.envelopes ? r.envelopes->lower[i] : NAN) << ','
          << format_double(r.envelopes ? r.envelopes->upper[i] : NAN) << '\n';
    }
    close_out(out, p);
  }
  {
    const auto p = dir / "indicator.csv";
    auto out = open_out(p);
    out << "x,value,se\n";
    for (std::size_t i = 0; i < r.indicator.size(); ++i)
      out << format_double(r.x_grid[i]) << ',' << format_double(r.indicator[i].value) << ','
          << format_double(r.indicator[i].se) << '\n';
    close_out(out, p);
  }
  {
    const auto p = dir / "violations.csv";
    auto out = open_out(p);
    out << "index,x,density,bound,side\n";
    for (const auto& v : r.violations.items)
      out << v.index << ',' << format_double(v.x) << ',' << format_double(v.density) << ','
          << format_double(v.bound) << ',' << v.side << '\n';
    close_out(out, p);
  }
  {
    json d;
    d["version"] = kVersion;
    d["preset"] = r.config.preset;
    d["seed"] = r.config.seed;
    d["config"] = r.config.to_json();
    d["audit_scope"] = "sampled evaluations; a pass is evidence, not proof";
    for (const auto& [k, v] : r.diagnostics.items()) d[k] = v;
    d["audits"] = audits_json(r.audits);
    d["certificate"] = certificate_json(r.certificate);
    json check{{"slack", r.config.slack},
               {"points", r.check_grid.size()},
               {"range", r.check_grid.empty() ? json(nullptr) : json{r.check_grid.front(), r.check_grid.back()}},
               {"method", "kde"},
               {"checked", r.certificate.has_value()},
               {"violations", r.violations.items.size()}};
    d["envelope_check"] = check;
    d["exit_status"] = r.exit_status();
    const auto p = dir / "diagnostics.json";
    auto out = open_out(p);
    out << d.dump(2) << '\n';
    close_out(out, p);
  }
  {
    json t;
    for (const auto& [k, v] : r.timing) t[k] = v;
    t["threads"] = default_threads();
    const auto p = dir / "timing.json";
    auto out = open_out(p);
    out << t.dump(2) << '\n';
    close_out(out, p);
  }
}

void emit_error(const json& config_echo, const Error& error, const std::filesystem::path& dir) {
  make_dir(dir);
  json d;
  d["version"] = kVersion;
  d["config"] = config_echo;
  d["error"] = {{"kind", to_string(error.kind())}, {"message", error.what()}};
  d["exit_status"] = exit_code(error.kind());
  const auto p = dir / "diagnostics.json";
  auto out = open_out(p);
  out << d.dump(2) << '\n';
  close_out(out, p);
}

}  // namespace maldens
