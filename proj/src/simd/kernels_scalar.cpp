#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "exp_constants.hpp"
#include "maldens/simd/kernels.hpp"

namespace maldens::simd {
namespace {

using namespace detail;

inline double pow2(double k) {
  const auto biased = static_cast<std::uint64_t>(static_cast<std::int64_t>(k) + 1023);
  return std::bit_cast<double>(biased << 52);
}

// Eight accumulator lanes merged the way the vector variant merges them.
struct Lanes {
  double a[4] = {0, 0, 0, 0};
  double b[4] = {0, 0, 0, 0};

  double merge() const {
    const double v0 = a[0] + b[0];
    const double v1 = a[1] + b[1];
    const double v2 = a[2] + b[2];
    const double v3 = a[3] + b[3];
    return (v0 + v1) + (v2 + v3);
  }
};

template <class Term>
double lane_reduce(std::size_t n, Term term) {
  Lanes acc;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 4; ++l) acc.a[l] += term(i + l);
    for (int l = 0; l < 4; ++l) acc.b[l] += term(i + 4 + l);
  }
  if (i + 4 <= n) {
    for (int l = 0; l < 4; ++l) acc.a[l] += term(i + l);
    i += 4;
  }
  double total = acc.merge();
  for (; i < n; ++i) total += term(i);
  return total;
}

double sum_scalar(const double* x, std::size_t n) {
  return lane_reduce(n, [x](std::size_t i) { return x[i]; });
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  return lane_reduce(n, [a, b](std::size_t i) { return a[i] * b[i]; });
}

void exp_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = exp1(x[i]);
}

void affine_scalar(double a, const double* x, double b, const double* y, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

GaussSums gauss_sums_scalar(double center, double inv_bw, double shift, const double* x,
                            const double* z, std::size_t n) {
  auto weight = [=](std::size_t i) {
    const double d = (x[i] - center) * inv_bw;
    const double q = d * d;
    const double half = q * 0.5;
    return exp1(shift - half);
  };
  GaussSums s;
  // Three independent lane reductions share the same per-element weight.
  Lanes w, w2, wz;
  std::size_t i = 0;
  auto step = [&](double* lw, double* lw2, double* lwz, std::size_t j) {
    const double v = weight(j);
    *lw += v;
    *lw2 += v * v;
    if (z) *lwz += v * z[j];
  };
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 4; ++l) step(&w.a[l], &w2.a[l], &wz.a[l], i + l);
    for (int l = 0; l < 4; ++l) step(&w.b[l], &w2.b[l], &wz.b[l], i + 4 + l);
  }
  if (i + 4 <= n) {
    for (int l = 0; l < 4; ++l) step(&w.a[l], &w2.a[l], &wz.a[l], i + l);
    i += 4;
  }
  s.w = w.merge();
  s.w2 = w2.merge();
  s.wz = wz.merge();
  for (; i < n; ++i) step(&s.w, &s.w2, &s.wz, i);
  return s;
}

double min_sq_dist_scalar(double center, const double* x, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    const double q = d * d;
    m = q < m ? q : m;
  }
  return m;
}

}  // namespace

double exp1(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x > kExpHi) return std::numeric_limits<double>::infinity();
  if (x < kExpLo) return 0.0;
  const double k = std::nearbyint(x * kLog2e);
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;
  double p = kExpPoly[13];
  for (int j = 12; j >= 0; --j) p = p * r + kExpPoly[j];
  const double k1 = std::floor(k * 0.5);
  const double k2 = k - k1;
  return (p * pow2(k1)) * pow2(k2);
}

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::scalar,       "scalar",           sum_scalar,
                                 dot_scalar,        exp_scalar,         affine_scalar,
                                 gauss_sums_scalar, min_sq_dist_scalar};
  return table;
}

}  // namespace maldens::simd
