// maldens: run density experiments from JSON configs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "checks.hpp"
#include "json.hpp"
#include "maldens/experiment.hpp"
#include "maldens/parallel.hpp"

using namespace maldens;
using json = nlohmann::ordered_json;

namespace {

void summary(const ExperimentReport& r, const std::string& out) {
  std::printf("preset %s  seed %llu  paths %zu\n", r.config.preset.c_str(),
              static_cast<unsigned long long>(r.config.seed), r.config.n_paths);
  for (const auto& d : r.densities) std::printf("  %-14s mass %.6f\n", d.method.c_str(), d.mass);
  for (const auto& a : r.audits.records())
    std::printf("  audit %-13s %s  (%zu checked, %zu violations)\n", a.id.c_str(), a.pass() ? "ok  " : "FAIL",
                a.tally.checked, a.tally.violations);
  if (r.certificate)
    std::printf("  envelope check: %zu points, %zu violations\n", r.check_grid.size(), r.violations.items.size());
  else
    std::printf("  envelope check skipped: no certificate\n");
  std::printf("  outputs in %s, exit status %d\n", out.c_str(), r.exit_status());
}

// Best-effort echo of the raw config for error records.
json raw_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) return nullptr;
  try {
    return json::parse(in);
  } catch (...) {
    return nullptr;
  }
}

int cmd_run(const std::string& config_path, const std::string& preset, const std::string& out,
            std::optional<std::uint64_t> seed) {
  json echo = config_path.empty() ? json(nullptr) : raw_config(config_path);
  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig::defaults(preset) : load_config(config_path);
    if (seed) cfg.seed = *seed;
    echo = cfg.to_json();
    const ExperimentReport r = run_experiment(cfg);
    emit_outputs(r, out);
    summary(r, out);
    return r.exit_status();
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    try {
      emit_error(echo, e, out);
    } catch (const Error& io) {
      std::fprintf(stderr, "error (%s): %s\n", to_string(io.kind()), io.what());
    }
    return exit_code(e.kind());
  }
}

int cmd_validate_kernel() {
  std::printf("%6s %6s %22s %22s %12s\n", "H", "t", "int K^2", "t^2H", "rel.err");
  for (const auto& r : checks::kernel_identity_rows())
    std::printf("%6.2f %6.2f %22.17g %22.17g %12.3e\n", r.H, r.t, r.integral, r.expected, r.rel_error);
  const auto a = checks::kernel_identity(), b = checks::c_h_fixture();
  std::printf("%s kernel identity: %s\n", a.pass ? "PASS" : "FAIL", a.detail.c_str());
  std::printf("%s c_H: %s\n", b.pass ? "PASS" : "FAIL", b.detail.c_str());
  return a.pass && b.pass ? 0 : 4;
}

int cmd_gaussian_sanity(std::size_t n, std::uint64_t seed) {
  const auto g = checks::gaussian_sanity(n, seed);
  const bool ok = g.max_error <= 0.02;
  std::printf("%s linear preset n=%zu: max |rho - phi| on [-3,3] = %.5f (tol 0.02), mass %.6f, %.2f s\n",
              ok ? "PASS" : "FAIL", n, g.max_error, g.mass, g.seconds);
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo density reconstruction for Wiener functionals"};
  app.require_subcommand(1);
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "worker threads (default: MALDENS_THREADS, else all cores)");

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  std::string config_path, preset, out;
  std::optional<std::uint64_t> seed;
  auto* cfg_opt = run->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  run->add_option("--preset", preset, "run a preset with its defaults")->excludes(cfg_opt);
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--threads", threads, "worker threads");

  auto* vk = app.add_subcommand("validate-kernel", "Volterra kernel identities");

  auto* gs = app.add_subcommand("gaussian-sanity", "linear preset against the exact Gaussian");
  std::size_t gs_n = 50000;
  std::uint64_t gs_seed = 1;
  gs->add_option("--n", gs_n, "paths");
  gs->add_option("--seed", gs_seed, "seed");
  gs->add_option("--threads", threads, "worker threads");

  auto* ps = app.add_subcommand("presets", "list presets, or print one preset's default config");
  std::string show;
  ps->add_option("name", show, "preset to print");

  CLI11_PARSE(app, argc, argv);

  try {
    set_default_threads(resolve_threads(threads));
    if (*run) {
      if (config_path.empty() && preset.empty()) {
        std::fprintf(stderr, "run: one of --config or --preset is required\n");
        return 5;
      }
      return cmd_run(config_path, preset, out, seed);
    }
    if (*vk) return cmd_validate_kernel();
    if (*gs) return cmd_gaussian_sanity(gs_n, gs_seed);
    if (*ps) {
      if (show.empty()) {
        for (const auto& p : preset_names()) std::printf("%s\n", p.c_str());
      } else {
        std::printf("%s\n", ExperimentConfig::defaults(show).to_json().dump(2).c_str());
      }
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  }
  return 0;
}
