#include "axb/matrix.hpp"

#include <cmath>

namespace axb {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroWeight:
      return "ZeroWeight";
    case ErrorCode::ZeroRow:
      return "ZeroRow";
    case ErrorCode::ZeroColumn:
      return "ZeroColumn";
    case ErrorCode::ZeroMatrix:
      return "ZeroMatrix";
    case ErrorCode::ZeroReference:
      return "ZeroReference";
    case ErrorCode::ShapeMismatch:
      return "ShapeMismatch";
    case ErrorCode::BadShape:
      return "BadShape";
    case ErrorCode::BadSpec:
      return "BadSpec";
    case ErrorCode::TooLarge:
      return "TooLarge";
    case ErrorCode::ParseError:
      return "ParseError";
    case ErrorCode::DimensionError:
      return "DimensionError";
    case ErrorCode::DuplicateEntry:
      return "DuplicateEntry";
    case ErrorCode::IoError:
      return "IoError";
  }
  return "Unknown";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::BadShape,
                "DenseMatrix: data size " + std::to_string(data_.size()) +
                    " does not match " + std::to_string(rows_) + "x" +
                    std::to_string(cols_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::BadShape, "DenseMatrix: non-finite entry");
    }
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix eye(n, n);
  for (std::size_t i = 0; i < n; ++i) eye(i, i) = 1.0;
  return eye;
}

void DenseMatrix::fill(double value) {
  for (double& v : data_) v = value;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::ShapeMismatch,
                "matmul: " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " times " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

}  // namespace axb
