#include "maldens/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "maldens/error.hpp"

namespace maldens {
namespace {

// Returns the failing leading-minor order (1-based) or nullopt on success.
std::optional<std::size_t> try_cholesky(const Matrix& a, double shift, Matrix& l) {
  const std::size_t n = a.rows();
  l = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) + shift;
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return j + 1;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return std::nullopt;
}

}  // namespace

CholeskyResult cholesky_with_jitter(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("cholesky: matrix is not square");
  CholeskyResult out;
  auto bad = try_cholesky(a, 0.0, out.lower);
  if (!bad) return out;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  for (double jitter : {1e-12 * max_diag, 1e-11 * max_diag}) {
    bad = try_cholesky(a, jitter, out.lower);
    if (!bad) {
      out.jitter = jitter;
      return out;
    }
  }
  throw NumericalError("cholesky: leading minor of order " + std::to_string(*bad) + " of " +
                       std::to_string(a.rows()) + " is not positive after jitter");
}

}  // namespace maldens
