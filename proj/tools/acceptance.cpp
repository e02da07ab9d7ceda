// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "maldens/experiment.hpp"
#include "maldens/parallel.hpp"
#include "maldens/regression.hpp"

using namespace maldens;
namespace fs = std::filesystem;

namespace {

double gauss(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct MassLog {
  std::vector<std::string> lines;
  std::size_t checked = 0, bad = 0;
  double lo = 1e300, hi = -1e300;
  void add(const std::string& run, const ExperimentReport& r) {
    for (const auto& d : r.densities) {
      ++checked;
      lo = std::min(lo, d.mass);
      hi = std::max(hi, d.mass);
      if (!(d.mass >= 0.98 && d.mass <= 1.02)) {
        ++bad;
        lines.push_back(fmt("%s/%s mass %.5f", run.c_str(), d.method.c_str(), d.mass));
      }
    }
  }
};

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

// Runs a criterion body; an exception is a failure with its message.
void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("error: ") + e.what());
  }
}

double max_error_vs(const DensityEstimate& d, double var, double lo, double hi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < d.x_grid.size(); ++i)
    if (d.x_grid[i] >= lo && d.x_grid[i] <= hi) worst = std::max(worst, std::abs(d.values[i] - gauss(d.x_grid[i], var)));
  return worst;
}

// Trapezoid of |a - b| over grid points inside [lo, hi].
double l1_between(const DensityEstimate& a, const DensityEstimate& b, double lo, double hi) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.x_grid.size(); ++i) {
    if (a.x_grid[i] < lo || a.x_grid[i + 1] > hi) continue;
    acc += 0.5 * (a.x_grid[i + 1] - a.x_grid[i]) *
           (std::abs(a.values[i] - b.values[i]) + std::abs(a.values[i + 1] - b.values[i + 1]));
  }
  return acc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  MassLog masses;
  const auto t_all = std::chrono::steady_clock::now();
  std::printf("threads: %zu\n", default_threads());

  guarded(1, [&] {
    ExperimentConfig c = ExperimentConfig::defaults("linear");
    c.n_paths = 50000;
    c.x_min = -3.0;
    c.x_max = 3.0;
    c.x_points = 121;
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport r = run_experiment(c);
    const double secs = seconds_since(t0);
    masses.add("linear-n5e4", r);
    const double err = max_error_vs(*r.density("nourdin_viens"), 1.0, -3.0, 3.0);
    report(1, err <= 0.02 && secs <= 60.0,
           fmt("linear n=5e4 max|rho_NV - phi| on [-3,3] = %.5f (tol 0.02), %.1f s (limit 60)", err, secs));
  });

  guarded(2, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto o = checks::kernel_identity(1e-3);
    const double secs = seconds_since(t0);
    report(2, o.pass && secs <= 5.0, o.detail + fmt(", %.2f s (limit 5)", secs));
  });

  guarded(3, [&] {
    const auto o = checks::c_h_fixture(1e-3);
    report(3, o.pass, o.detail);
  });

  guarded(4, [&] {
    ExperimentConfig c = ExperimentConfig::defaults("additive-linear");
    c.n_paths = 20000;
    c.n_points = 1025;
    c.n_copies = 64;  // f' is constant, the copies do not enter
    const ExperimentReport r = run_experiment(c);
    masses.add("additive-linear-1025", r);
    double gdev = 0.0;
    for (double g : r.samples.G) gdev = std::max(gdev, std::abs(g - 4.0 / 3.0));
    const double e_nv = max_error_vs(*r.density("nourdin_viens"), 4.0 / 3.0, -1e300, 1e300);
    const double e_nr = max_error_vs(*r.density("new_repr"), 4.0 / 3.0, -1e300, 1e300);
    report(4, gdev <= 1e-6 && e_nv <= 0.02 && e_nr <= 0.02,
           fmt("max|G - 4/3| = %.2e (tol 1e-6) over %zu paths; max|rho - N(0,4/3)|: NV %.5f, new_repr %.5f (tol 0.02)",
               gdev, r.samples.G.size(), e_nv, e_nr));
  });

  guarded(5, [&] {
    ExperimentConfig c = ExperimentConfig::defaults("additive-exp");
    c.n_paths = 10000;
    c.kde_paths = 100000;
    c.check_min = -2.0;
    c.check_max = 0.0;
    c.check_points = 21;
    c.slack = 0.1;
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport r = run_experiment(c);
    const double secs = seconds_since(t0);
    masses.add("additive-exp", r);
    const auto* g = r.audits.find("G_floor");
    const auto* h = r.audits.find("h_sign");
    const bool checked = r.certificate.has_value() && r.check_grid.size() == 21;
    report(5, g->pass() && h->pass() && checked && r.violations.pass() && secs <= 600.0,
           fmt("G floor %zu/%zu violations (worst margin %.3g); h sign %zu/%zu; KDE n=1e5 vs lower envelope on "
               "21 points in [-2,0]: %zu violations; %.1f s (limit 600)",
               g->tally.violations, g->tally.checked, g->tally.worst_margin, h->tally.violations, h->tally.checked,
               checked ? r.violations.items.size() : std::size_t(999), secs));
  });

  guarded(6, [&] {
    ExperimentConfig c = ExperimentConfig::defaults("sde-sine");
    c.n_points = 65;
    c.n_paths = 2000;
    c.n_sub = 128;
    c.check_min.reset();
    c.check_max.reset();
    c.check_central = 0.9;
    c.slack = 0.1;
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport r = run_experiment(c);
    const double secs = seconds_since(t0);
    masses.add("sde-sine", r);
    const auto* m = r.audits.find("m_bound");
    const auto* phi = r.audits.find("Phi_floor");
    const bool checked = r.certificate.has_value();
    report(6, m->pass() && phi->pass() && checked && r.violations.pass() && secs <= 1200.0,
           fmt("|m| <= 1e-12: %zu/%zu violations; Phi floor: %zu/%zu violations (worst margin %.3g); envelope on "
               "central 90%% (%zu points): %zu violations; %.1f s (limit 1200)",
               m->tally.violations, m->tally.checked, phi->tally.violations, phi->tally.checked,
               phi->tally.worst_margin, r.check_grid.size(), checked ? r.violations.items.size() : std::size_t(999),
               secs));
  });

  guarded(7, [&] {
    ExperimentConfig c = ExperimentConfig::defaults("additive-exp");
    c.n_paths = 20000;
    c.kde_paths = 0;
    c.x_points = 401;
    const ExperimentReport r = run_experiment(c);
    masses.add("additive-exp-n2e4", r);
    const double lo = empirical_quantile(r.samples.F, 0.025), hi = empirical_quantile(r.samples.F, 0.975);
    const auto& nv = *r.density("nourdin_viens");
    const auto& nr = *r.density("new_repr");
    const auto& kde = *r.density("kde");
    const double a = l1_between(nv, nr, lo, hi), b = l1_between(nv, kde, lo, hi), d = l1_between(nr, kde, lo, hi);
    report(7, std::max({a, b, d}) <= 0.1,
           fmt("L1 on [%.3f, %.3f]: NV-new_repr %.4f, NV-KDE %.4f, new_repr-KDE %.4f (tol 0.1)", lo, hi, a, b, d));
  });

  guarded(8, [&] {
    ExperimentConfig c = ExperimentConfig::defaults("linear");
    c.n_paths = 100000;
    const ExperimentReport r = run_experiment(c);
    masses.add("linear-n1e5", r);
    const auto delta = r.samples.delta();
    bool ok = true;
    std::string detail = "n=1e5";
    for (double x : {-1.0, 0.0, 1.0}) {
      const IndicatorValue v = indicator_density(r.samples.F, delta, x);
      const double z = (v.value - gauss(x, 1.0)) / v.se;
      ok = ok && std::abs(z) <= 3.0;
      detail += fmt("; x=%g: %.5f vs %.5f (%.2f SE)", x, v.value, gauss(x, 1.0), z);
    }
    report(8, ok, detail);
  });

  guarded(9, [&] {
    for (const char* p : {"additive-concave", "sde-custom"}) masses.add(p, run_experiment(ExperimentConfig::defaults(p)));
    std::string detail = fmt("%zu estimates from all runs above plus additive-concave and sde-custom defaults, "
                             "masses in [%.5f, %.5f]",
                             masses.checked, masses.lo, masses.hi);
    for (const auto& l : masses.lines) detail += "; " + l;
    report(9, masses.bad == 0 && masses.checked > 0, detail);
  });

  guarded(10, [&] {
    const fs::path root = fs::temp_directory_path() / ("maldens_acceptance_" + std::to_string(::getpid()));
    const std::size_t saved = default_threads();
    std::size_t compared = 0;
    std::vector<std::string> diffs;
    for (const auto& p : preset_names()) {
      ExperimentConfig c = ExperimentConfig::defaults(p);
      c.n_paths = p.rfind("sde-", 0) == 0 ? 200 : 2000;
      c.kde_paths = 4 * c.n_paths;
      c.n_sub = 32;
      std::vector<std::string> runs;
      int k = 0;
      for (std::size_t threads : {1, 8, 8}) {
        set_default_threads(threads);
        const fs::path dir = root / (p + "_" + std::to_string(k++));
        emit_outputs(run_experiment(c), dir);
        std::string all;
        for (const char* f : {"density.csv", "indicator.csv", "violations.csv", "diagnostics.json"})
          all += slurp(dir / f) + '\x1e';
        runs.push_back(all);
      }
      ++compared;
      if (runs[0] != runs[1] || runs[1] != runs[2]) diffs.push_back(p);
    }
    set_default_threads(saved);
    fs::remove_all(root);
    std::string detail = fmt("%zu presets, runs at 1, 8, 8 threads, emitted files byte-identical", compared);
    for (const auto& d : diffs) detail += "; differs: " + d;
    report(10, diffs.empty(), detail);
  });

  std::printf("%d of 10 criteria failed, %.1f s total\n", failures, seconds_since(t_all));
  return failures == 0 ? 0 : 1;
}
