#include <cmath>
#include <vector>

#include "doctest.h"
#include "maldens/rng.hpp"

using namespace maldens;

// Known-answer vectors published with the Random123 library.
TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of their identifiers") {
  NormalStream a(7, 3, 1), b(7, 3, 1), c(7, 4, 1), d(8, 3, 1);
  std::vector<double> va(50), vb(50), vc(50), vd(50);
  a.fill_normal(va);
  b.fill_normal(vb);
  c.fill_normal(vc);
  d.fill_normal(vd);
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("uniforms stay in the open unit interval and normals have unit moments") {
  NormalStream s(12345, 0);
  const int n = 200000;
  double lo = 1, hi = 0;
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 5.0 / std::sqrt(n));
  CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("mix_seed separates tags") {
  CHECK(mix_seed(1, stream_tag::paths) != mix_seed(1, stream_tag::copies));
  CHECK(mix_seed(1, stream_tag::paths) != mix_seed(2, stream_tag::paths));
  CHECK(mix_seed(1, stream_tag::paths) == mix_seed(1, stream_tag::paths));
}
