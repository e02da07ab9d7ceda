#pragma once

// Shared constants for the exponential kernel. Both variants evaluate
//   k = nearbyint(x * log2e)
//   r = (x - k * ln2_hi) - k * ln2_lo
//   p = Taylor polynomial of degree 13 in r (Horner)
//   exp(x) = (p * 2^floor(k/2)) * 2^(k - floor(k/2))
// The split scale keeps both factors normal for k in [-1022, 1024].

namespace maldens::simd::detail {

inline constexpr double kExpHi = 709.782712893384;
inline constexpr double kExpLo = -708.3964185322641;
inline constexpr double kLog2e = 1.4426950408889634;
inline constexpr double kLn2Hi = 0.693145751953125;
inline constexpr double kLn2Lo = 1.42860682030941723212e-06;

inline constexpr double kExpPoly[14] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

}  // namespace maldens::simd::detail
