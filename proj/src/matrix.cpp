#include "likeability/matrix.hpp"

#include <string>

namespace likeability::nn {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw NnError(NnErrorKind::DimensionMismatch,
                  "Matrix: " + std::to_string(values_.size()) +
                      " values for a " + std::to_string(rows_) + "x" +
                      std::to_string(cols_) + " matrix");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

[[noreturn]] void mismatch(const char* op, const Matrix& a, const Matrix& b) {
  throw NnError(NnErrorKind::DimensionMismatch,
                std::string(op) + ": cannot combine " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " with " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) mismatch("matmul", a, b);
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
      c(i, j) = sum;
    }
  }
  return c;
}

Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) mismatch("matmul_transposed", a, b);
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto lhs = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto rhs = b.row(j);
      double sum = 0.0;
      for (std::size_t k = 0; k < lhs.size(); ++k) sum += lhs[k] * rhs[k];
      c(i, j) = sum;
    }
  }
  return c;
}

}  // namespace likeability::nn
