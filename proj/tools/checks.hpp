#pragma once

// Checks shared by the CLI subcommands and the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

namespace maldens::checks {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct KernelRow {
  double H, t, integral, expected, rel_error;
};

// int_0^t K_H(t, s)^2 ds against t^{2H}.
std::vector<KernelRow> kernel_identity_rows();
Outcome kernel_identity(double tol = 1e-3);

inline constexpr double kCH075 = 0.26741;  // log-Gamma oracle, see tests/oracles
Outcome c_h_fixture(double tol = 1e-3);

// Linear preset, sigma = 1: max |rho_NV - phi| over x in [-3, 3].
struct GaussianSanity {
  double max_error;
  double seconds;
  double mass;
};
GaussianSanity gaussian_sanity(std::size_t n_paths, std::uint64_t seed);

}  // namespace maldens::checks
