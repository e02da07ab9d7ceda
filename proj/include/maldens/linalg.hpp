#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace maldens {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

struct CholeskyResult {
  Matrix lower;          // L with A + jitter*I = L L^T
  double jitter = 0.0;   // diagonal shift that was needed (0 if none)
};

// Factors a symmetric matrix. On failure retries with a diagonal jitter of
// 1e-12 * max diagonal, then ten times that; if both fail, throws
// NumericalError naming the first leading minor that was not positive.
CholeskyResult cholesky_with_jitter(const Matrix& a);

}  // namespace maldens
