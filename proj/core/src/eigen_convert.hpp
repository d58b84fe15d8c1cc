#pragma once

#include <Eigen/Core>

#include "axb/matrix.hpp"

namespace axb {

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

inline DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix m(static_cast<std::size_t>(e.rows()),
                static_cast<std::size_t>(e.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      m(i, j) = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return m;
}

}  // namespace axb
