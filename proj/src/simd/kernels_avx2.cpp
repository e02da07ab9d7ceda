#include "maldens/simd/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "exp_constants.hpp"

namespace maldens::simd {
namespace {

using namespace detail;

inline __m256d pow2(__m256d k) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  const __m256d t = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), magic);
  return _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(t), 52));
}

inline __m256d exp4(__m256d x) {
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(k, _mm256_set1_pd(kLn2Hi))),
                                  _mm256_mul_pd(k, _mm256_set1_pd(kLn2Lo)));
  __m256d p = _mm256_set1_pd(kExpPoly[13]);
  for (int j = 12; j >= 0; --j) p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpPoly[j]));
  const __m256d k1 = _mm256_floor_pd(_mm256_mul_pd(k, _mm256_set1_pd(0.5)));
  const __m256d k2 = _mm256_sub_pd(k, k1);
  __m256d res = _mm256_mul_pd(_mm256_mul_pd(p, pow2(k1)), pow2(k2));
  res = _mm256_blendv_pd(res, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                         _mm256_cmp_pd(x, _mm256_set1_pd(kExpHi), _CMP_GT_OQ));
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(),
                         _mm256_cmp_pd(x, _mm256_set1_pd(kExpLo), _CMP_LT_OQ));
  res = _mm256_blendv_pd(res, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return res;
}

inline double merge(__m256d a, __m256d b) {
  const __m256d v = _mm256_add_pd(a, b);
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d h = _mm_hadd_pd(lo, hi);  // (v0 + v1, v2 + v3)
  return _mm_cvtsd_f64(_mm_add_sd(h, _mm_unpackhi_pd(h, h)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_add_pd(a, _mm256_loadu_pd(x + i));
    b = _mm256_add_pd(b, _mm256_loadu_pd(x + i + 4));
  }
  if (i + 4 <= n) {
    a = _mm256_add_pd(a, _mm256_loadu_pd(x + i));
    i += 4;
  }
  double total = merge(a, b);
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a = _mm256_add_pd(a, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    b = _mm256_add_pd(b, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  if (i + 4 <= n) {
    a = _mm256_add_pd(a, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    i += 4;
  }
  double total = merge(a, b);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

void exp_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = exp1(x[i]);
}

void affine_avx2(double a, const double* x, double b, const double* y, double* out,
                 std::size_t n) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

GaussSums gauss_sums_avx2(double center, double inv_bw, double shift, const double* x,
                          const double* z, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(center), vi = _mm256_set1_pd(inv_bw);
  const __m256d vs = _mm256_set1_pd(shift), half = _mm256_set1_pd(0.5);
  auto weight = [&](std::size_t j) {
    const __m256d d = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + j), vc), vi);
    const __m256d q = _mm256_mul_pd(d, d);
    return exp4(_mm256_sub_pd(vs, _mm256_mul_pd(q, half)));
  };
  __m256d wa = _mm256_setzero_pd(), wb = wa, w2a = wa, w2b = wa, wza = wa, wzb = wa;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d u = weight(i), v = weight(i + 4);
    wa = _mm256_add_pd(wa, u);
    wb = _mm256_add_pd(wb, v);
    w2a = _mm256_add_pd(w2a, _mm256_mul_pd(u, u));
    w2b = _mm256_add_pd(w2b, _mm256_mul_pd(v, v));
    if (z) {
      wza = _mm256_add_pd(wza, _mm256_mul_pd(u, _mm256_loadu_pd(z + i)));
      wzb = _mm256_add_pd(wzb, _mm256_mul_pd(v, _mm256_loadu_pd(z + i + 4)));
    }
  }
  if (i + 4 <= n) {
    const __m256d u = weight(i);
    wa = _mm256_add_pd(wa, u);
    w2a = _mm256_add_pd(w2a, _mm256_mul_pd(u, u));
    if (z) wza = _mm256_add_pd(wza, _mm256_mul_pd(u, _mm256_loadu_pd(z + i)));
    i += 4;
  }
  GaussSums s{merge(wa, wb), merge(w2a, w2b), merge(wza, wzb)};
  for (; i < n; ++i) {
    const double d = (x[i] - center) * inv_bw;
    const double q = d * d;
    const double v = exp1(shift - q * 0.5);
    s.w += v;
    s.w2 += v * v;
    if (z) s.wz += v * z[i];
  }
  return s;
}

double min_sq_dist_avx2(double center, const double* x, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(center);
  __m256d m = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
    m = _mm256_min_pd(m, _mm256_mul_pd(d, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double best = lanes[0];
  for (int l = 1; l < 4; ++l) best = lanes[l] < best ? lanes[l] : best;
  for (; i < n; ++i) {
    const double d = x[i] - center;
    const double q = d * d;
    best = q < best ? q : best;
  }
  return best;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const KernelTable table{Isa::avx2,      "avx2",         sum_avx2,
                                 dot_avx2,       exp_avx2,       affine_avx2,
                                 gauss_sums_avx2, min_sq_dist_avx2};
  return &table;
}

}  // namespace maldens::simd

#else

namespace maldens::simd {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace maldens::simd

#endif
