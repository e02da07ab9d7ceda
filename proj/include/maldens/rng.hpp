#pragma once

// Counter-based random numbers. A stream is identified by (seed, a, b); the
// k-th draw of a stream is a pure function of (seed, a, b, k), so work can be
// scheduled on any number of threads without changing results.

#include <array>
#include <cstdint>
#include <span>

namespace maldens {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// SplitMix64 finalizer; used to derive independent seeds from one master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

// Domain tags for deriving independent streams from a master seed.
namespace stream_tag {
inline constexpr std::uint64_t paths = 0x70617468;      // main experiment paths
inline constexpr std::uint64_t copies = 0x636f7079;     // Mehler independent copies
inline constexpr std::uint64_t centering = 0x63656e74;  // centering pre-pass
inline constexpr std::uint64_t nested = 0x6e657374;     // conditional sub-simulations
}  // namespace stream_tag

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t a, std::uint32_t b = 0) noexcept;

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;

  // Standard normal via Box-Muller; exactly one block per two normals.
  double normal() noexcept;

  void fill_normal(std::span<double> out, double scale = 1.0) noexcept;

 private:
  std::array<std::uint32_t, 4> next_block() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint32_t a_, b_;
  std::uint64_t block_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace maldens
