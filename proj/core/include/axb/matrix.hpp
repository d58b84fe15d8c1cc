#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace axb {

enum class ErrorCode {
  ZeroWeight,
  ZeroRow,
  ZeroColumn,
  ZeroMatrix,
  ZeroReference,
  ShapeMismatch,
  BadShape,
  BadSpec,
  TooLarge,
  ParseError,
  DimensionError,
  DuplicateEntry,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

// Dense real matrix, row-major. Entries are validated finite when constructed
// from external data; in-place mutation by the solvers is unchecked.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double value);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix transpose(const DenseMatrix& m);

// Naive triple-loop product; convenience for tests and tooling, not a kernel.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace axb
