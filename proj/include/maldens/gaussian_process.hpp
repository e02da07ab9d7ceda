#pragma once

// Covariance models of centered Gaussian processes on [0, T] and exact
// sampling of their values on a time grid.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "maldens/linalg.hpp"
#include "maldens/quadrature.hpp"

namespace maldens {

double fbm_covariance(double s, double t, double H);

class CovarianceModel {
 public:
  enum class Kind { brownian, fbm, custom };

  static CovarianceModel brownian();
  static CovarianceModel fbm(double H);
  static CovarianceModel custom(std::function<double(double, double)> r, std::string name);

  Kind kind() const noexcept { return kind_; }
  double hurst() const noexcept { return hurst_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(double s, double t) const;

 private:
  Kind kind_ = Kind::brownian;
  double hurst_ = 0.5;
  std::string name_ = "brownian";
  std::function<double(double, double)> custom_;
};

Matrix covariance_matrix(const CovarianceModel& cov, std::span<const double> times);

struct PathSet {
  TimeGrid grid;
  Matrix paths;                           // n_paths x grid.size()
  std::optional<Matrix> driver_increments;
  std::uint64_t seed = 0;

  std::size_t n_paths() const noexcept { return paths.rows(); }
};

// Draws grid paths X = L Z one at a time. Path i of stream `seed` is a pure
// function of (seed, i), so any subset of paths can be regenerated on demand.
class PathSampler {
 public:
  PathSampler(const CovarianceModel& cov, const TimeGrid& grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  double jitter() const noexcept { return jitter_; }
  // True when X(0) is pinned to 0 and left out of the factorization.
  bool pinned_origin() const noexcept { return pinned_; }
  // Number of standard normals one path consumes.
  std::size_t dimension() const noexcept { return factor_.rows(); }

  // Writes grid.size() values; z (if non-empty) receives the normals used.
  void sample(std::uint64_t seed, std::uint64_t index, std::span<double> out,
              std::span<double> z = {}) const;

  // X = L z for caller-supplied normals.
  void apply(std::span<const double> z, std::span<double> out) const;

 private:
  TimeGrid grid_;
  Matrix factor_;
  double jitter_ = 0.0;
  bool pinned_ = false;
};

PathSet sample_paths(const CovarianceModel& cov, const TimeGrid& grid, std::size_t n_paths,
                     std::uint64_t seed, bool keep_normals = false);

struct SigmaT {
  double sigma2;  // trapezoid approximation of the double integral of R
  double min_r;   // smallest R(t_i, t_j) on the grid
};

SigmaT sigma_T_squared(const CovarianceModel& cov, const TimeGrid& grid);

}  // namespace maldens
