#include "maldens/gaussian_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maldens/error.hpp"
#include "maldens/parallel.hpp"
#include "maldens/rng.hpp"
#include "maldens/simd/kernels.hpp"

namespace maldens {

double fbm_covariance(double s, double t, double H) {
  if (!(H > 0.0 && H < 1.0)) throw InvalidArgument("fbm_covariance: H must lie in (0, 1)");
  if (s < 0.0 || t < 0.0) throw InvalidArgument("fbm_covariance: negative time");
  const double h2 = 2.0 * H;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

CovarianceModel CovarianceModel::brownian() { return {}; }

CovarianceModel CovarianceModel::fbm(double H) {
  if (!(H > 0.0 && H < 1.0)) throw InvalidArgument("fbm covariance: H must lie in (0, 1)");
  CovarianceModel m;
  m.kind_ = Kind::fbm;
  m.hurst_ = H;
  m.name_ = "fbm";
  return m;
}

CovarianceModel CovarianceModel::custom(std::function<double(double, double)> r, std::string name) {
  if (!r) throw InvalidArgument("custom covariance: empty function");
  CovarianceModel m;
  m.kind_ = Kind::custom;
  m.custom_ = std::move(r);
  m.name_ = std::move(name);
  return m;
}

double CovarianceModel::operator()(double s, double t) const {
  switch (kind_) {
    case Kind::brownian:
      return std::min(s, t);
    case Kind::fbm:
      return fbm_covariance(s, t, hurst_);
    case Kind::custom:
      return custom_(s, t);
  }
  return 0.0;
}

Matrix covariance_matrix(const CovarianceModel& cov, std::span<const double> times) {
  const std::size_t n = times.size();
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) r(i, j) = r(j, i) = cov(times[i], times[j]);
  return r;
}

PathSampler::PathSampler(const CovarianceModel& cov, const TimeGrid& grid) : grid_(grid) {
  pinned_ = cov(0.0, 0.0) == 0.0;
  const auto pts = grid.points();
  const auto times = pinned_ ? pts.subspan(1) : pts;
  auto chol = cholesky_with_jitter(covariance_matrix(cov, times));
  factor_ = std::move(chol.lower);
  jitter_ = chol.jitter;
}

void PathSampler::apply(std::span<const double> z, std::span<double> out) const {
  const std::size_t d = factor_.rows();
  const std::size_t off = pinned_ ? 1 : 0;
  if (z.size() != d || out.size() != d + off)
    throw InvalidArgument("PathSampler::apply: size mismatch");
  if (pinned_) out[0] = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    out[i + off] = simd::dot(factor_.row(i).first(i + 1), z.first(i + 1));
}

void PathSampler::sample(std::uint64_t seed, std::uint64_t index, std::span<double> out,
                         std::span<double> z) const {
  std::vector<double> local;
  if (z.empty()) {
    local.resize(dimension());
    z = local;
  }
  NormalStream stream(seed, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32));
  stream.fill_normal(z);
  apply(z, out);
}

PathSet sample_paths(const CovarianceModel& cov, const TimeGrid& grid, std::size_t n_paths,
                     std::uint64_t seed, bool keep_normals) {
  PathSet set{grid, Matrix(n_paths, grid.size()), std::nullopt, seed};
  if (n_paths == 0) return set;
  const PathSampler sampler(cov, grid);
  if (keep_normals) set.driver_increments = Matrix(n_paths, sampler.dimension());
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> z(sampler.dimension());
    for (std::size_t i = begin; i < end; ++i) {
      std::span<double> zi = keep_normals ? set.driver_increments->row(i) : std::span<double>(z);
      sampler.sample(seed, i, set.paths.row(i), zi);
    }
  });
  return set;
}

SigmaT sigma_T_squared(const CovarianceModel& cov, const TimeGrid& grid) {
  const auto& w = grid.trapezoid_weights();
  const std::size_t n = grid.size();
  SigmaT out{0.0, std::numeric_limits<double>::infinity()};
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = cov(grid[i], grid[j]);
      out.min_r = std::min(out.min_r, row[j]);
    }
    out.sigma2 += w[i] * simd::dot(w, row);
  }
  return out;
}

}  // namespace maldens
