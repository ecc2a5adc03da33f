#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "likeability/error.hpp"

namespace likeability::nn {

enum class NnErrorKind {
  DimensionMismatch,
  EmptyBatch,
  ForwardNotRun,
  EmptyCounts,
  BadArchitecture,
  BadThreshold,
  BadLabel,
};

using NnError = KindedError<NnErrorKind>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// A * B, accumulating over k in increasing order.
Matrix matmul(const Matrix& a, const Matrix& b);

/// A * B^T; the layout used by dense layers (rows of B are output units).
Matrix matmul_transposed(const Matrix& a, const Matrix& b);

}  // namespace likeability::nn
