#pragma once

// Config-driven experiment runner: model -> per-path samples -> regression
// -> density reconstruction -> hypothesis audits -> envelope certificate.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "maldens/audit.hpp"
#include "maldens/density.hpp"
#include "maldens/error.hpp"

namespace maldens {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  std::string preset;
  std::uint64_t seed = 1;
  double T = 1.0;
  std::size_t n_points = 65;
  std::size_t n_paths = 10000;
  std::size_t kde_paths = 0;  // 0: same as n_paths
  std::size_t centering_multiplier = 10;

  // model
  double sigma = 1.0;  // linear
  double c = 1.0;
  std::optional<double> fbm_H;  // additive covariance; unset means Brownian
  double x0 = 0.0, H = 0.75, M = 1.0, m_bound = 0.0;
  double a0 = 1.0, a1 = 0.0, s0 = 2.0, s1 = 0.5;  // sde-custom
  std::string scheme = "taylor2";                 // sde: "euler" or "taylor2"

  std::size_t laguerre_nodes = 32;
  std::size_t n_copies = 64;
  std::size_t n_sub = 128;
  bool sde_mehler = false;

  std::size_t x_points = 201;
  std::optional<double> x_min, x_max;

  double slack = 0.1;
  std::optional<double> check_min, check_max;
  double check_central = 0.9;
  std::size_t check_points = 41;

  std::optional<double> bandwidth;
  double min_neff = 5.0;

  std::size_t kde_sample_count() const { return kde_paths ? kde_paths : n_paths; }

  static ExperimentConfig defaults(const std::string& preset);
  // Preset defaults overlaid with the fields present in j. Throws ConfigError.
  static ExperimentConfig from_json(const nlohmann::ordered_json& j);
  nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& preset_names();

ExperimentConfig load_config(const std::filesystem::path& file);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<double> x_grid;
  std::vector<DensityEstimate> densities;  // fixed method order
  std::vector<IndicatorValue> indicator;   // on x_grid, when present

  AuditLog audits;
  std::optional<BoundCertificate> certificate;  // only when every audit passed
  std::optional<Envelopes> envelopes;           // on x_grid

  std::vector<double> check_grid;
  std::vector<double> check_density;  // KDE on check_grid
  std::optional<Envelopes> check_envelopes;
  ViolationReport violations;

  FunctionalSamples samples;        // regression samples
  std::vector<double> kde_samples;  // F values behind the KDE
  std::vector<double> phi_se;       // nested standard errors (SDE)

  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, double>> timing;  // seconds per phase

  const DensityEstimate* density(const std::string& method) const;
  // 0 pass, 2 envelope violation, 3 hypothesis breach.
  int exit_status() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

// density.csv, indicator.csv, violations.csv, diagnostics.json, timing.json.
void emit_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

// diagnostics.json carrying a structured error record.
void emit_error(const nlohmann::ordered_json& config_echo, const Error& error,
                const std::filesystem::path& dir);

// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

}  // namespace maldens
