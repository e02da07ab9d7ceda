#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "doctest.h"
#include "maldens/rng.hpp"
#include "maldens/simd/kernels.hpp"

using namespace maldens;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<double> noise(std::size_t n, std::uint32_t id, double scale = 1.0) {
  NormalStream s(99, id);
  std::vector<double> v(n);
  s.fill_normal(v, scale);
  return v;
}

}  // namespace

TEST_CASE("scalar exp agrees with libm") {
  double worst = 0.0;
  for (double x = -700.0; x <= 700.0; x += 0.37) {
    const double ref = std::exp(x);
    worst = std::max(worst, std::abs(simd::exp1(x) - ref) / ref);
  }
  CHECK(worst < 4e-16);
  CHECK(simd::exp1(0.0) == 1.0);
  CHECK(simd::exp1(800.0) == std::numeric_limits<double>::infinity());
  CHECK(simd::exp1(-800.0) == 0.0);
  CHECK(std::isnan(simd::exp1(std::nan(""))));
}

TEST_CASE("scalar reduction order is the documented lane order") {
  std::vector<double> x(13);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::ldexp(1.0, static_cast<int>(i) * 7 - 40);
  // lanes a hold elements 0..3 and 8..11, lanes b hold 4..7.
  double a[4], b[4];
  for (int l = 0; l < 4; ++l) {
    a[l] = (0.0 + x[l]) + x[8 + l];
    b[l] = 0.0 + x[4 + l];
  }
  double expect = ((a[0] + b[0]) + (a[1] + b[1])) + ((a[2] + b[2]) + (a[3] + b[3]));
  expect += x[12];
  CHECK(same_bits(simd::scalar_table().sum(x.data(), x.size()), expect));
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
  const simd::KernelTable* v = simd::avx2_table();
  if (!v || !simd::cpu_supports_avx2()) {
    MESSAGE("AVX2 variant unavailable on this host; skipping");
    return;
  }
  const simd::KernelTable& s = simd::scalar_table();
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 100u, 1027u}) {
    CAPTURE(n);
    auto x = noise(n, 1, 3.0);
    auto y = noise(n, 2);
    CHECK(same_bits(s.sum(x.data(), n), v->sum(x.data(), n)));
    CHECK(same_bits(s.dot(x.data(), y.data(), n), v->dot(x.data(), y.data(), n)));

    std::vector<double> e1(n), e2(n);
    auto wide = noise(n, 3, 300.0);
    s.exp(wide.data(), e1.data(), n);
    v->exp(wide.data(), e2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(same_bits(e1[i], e2[i]));

    s.affine(0.3, x.data(), -1.7, y.data(), e1.data(), n);
    v->affine(0.3, x.data(), -1.7, y.data(), e2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(same_bits(e1[i], e2[i]));

    for (const double* z : std::vector<const double*>{nullptr, y.data()}) {
      const auto g1 = s.gauss_sums(0.25, 1.9, 0.4, x.data(), z, n);
      const auto g2 = v->gauss_sums(0.25, 1.9, 0.4, x.data(), z, n);
      CHECK(same_bits(g1.w, g2.w));
      CHECK(same_bits(g1.w2, g2.w2));
      CHECK(same_bits(g1.wz, g2.wz));
    }
    CHECK(same_bits(s.min_sq_dist(0.1, x.data(), n), v->min_sq_dist(0.1, x.data(), n)));
  }
}

TEST_CASE("AVX2 exp handles the special values like the scalar path") {
  const simd::KernelTable* v = simd::avx2_table();
  if (!v || !simd::cpu_supports_avx2()) return;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> x = {0.0, -0.0, 709.78, 709.79, -708.39, -708.4, -1e6, 1e6,
                           inf,  -inf, 1e-300, -745.0, 1.0,     -1.0,   0.5,  2.0};
  std::vector<double> a(x.size()), b(x.size());
  simd::scalar_table().exp(x.data(), a.data(), x.size());
  v->exp(x.data(), b.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CAPTURE(x[i]);
    CHECK(same_bits(a[i], b[i]));
  }
}

TEST_CASE("gauss_sums matches a direct evaluation") {
  auto x = noise(37, 4);
  auto z = noise(37, 5);
  const auto g = simd::scalar_table().gauss_sums(0.2, 2.0, 0.0, x.data(), z.data(), x.size());
  double w = 0, w2 = 0, wz = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = (x[i] - 0.2) * 2.0;
    const double wi = std::exp(-0.5 * d * d);
    w += wi;
    w2 += wi * wi;
    wz += wi * z[i];
  }
  CHECK(g.w == doctest::Approx(w).epsilon(1e-14));
  CHECK(g.w2 == doctest::Approx(w2).epsilon(1e-14));
  CHECK(g.wz == doctest::Approx(wz).epsilon(1e-13));
}

TEST_CASE("select switches variants and active reflects it") {
  REQUIRE(simd::select(simd::Isa::scalar));
  CHECK(simd::active().isa == simd::Isa::scalar);
  if (simd::select(simd::Isa::avx2)) CHECK(simd::active().isa == simd::Isa::avx2);
  simd::select(simd::Isa::scalar);
}
