#pragma once

// Data-parallel inner loops with a portable scalar reference and an AVX2
// variant chosen at runtime.
//
// Every kernel has a fixed reduction order: eight lanes (two groups of four),
// merged as (lane_k + lane_{k+4}), then ((l0 + l1) + (l2 + l3)), then the
// remaining tail elements left to right. The scalar reference emulates the
// lanes, and no kernel uses fused multiply-add, so both variants produce
// bit-identical results. Outputs therefore do not depend on which variant
// the host CPU selects.

#include <cstddef>
#include <span>

namespace maldens::simd {

enum class Isa { scalar, avx2 };

struct GaussSums {
  double w = 0.0;   // sum of weights
  double w2 = 0.0;  // sum of squared weights
  double wz = 0.0;  // sum of weight * z (0 when z is absent)
};

struct KernelTable {
  Isa isa;
  const char* name;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*exp)(const double* x, double* out, std::size_t n);
  // out = a * x + b * y
  void (*affine)(double a, const double* x, double b, const double* y, double* out,
                 std::size_t n);
  // w_i = exp(shift - 0.5 * ((x_i - center) * inv_bw)^2); z may be null.
  GaussSums (*gauss_sums)(double center, double inv_bw, double shift, const double* x,
                          const double* z, std::size_t n);
  // min_i (x_i - center)^2
  double (*min_sq_dist)(double center, const double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table() noexcept;

bool cpu_supports_avx2() noexcept;

// The table in use. Chosen on first call from the CPU and the MALDENS_SIMD
// environment variable ("scalar", "avx2" or "auto").
const KernelTable& active() noexcept;

// Forces a variant; returns false (and changes nothing) when unavailable.
bool select(Isa isa) noexcept;

// Scalar exponential with exactly the arithmetic of the batch kernels.
double exp1(double x) noexcept;

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void exp(std::span<const double> x, std::span<double> out) {
  active().exp(x.data(), out.data(), x.size());
}

inline void affine(double a, std::span<const double> x, double b, std::span<const double> y,
                   std::span<double> out) {
  active().affine(a, x.data(), b, y.data(), out.data(), out.size());
}

}  // namespace maldens::simd
