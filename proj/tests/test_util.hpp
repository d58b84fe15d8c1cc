#pragma once

#include <cmath>
#include <vector>

#include "axb/matrix.hpp"
#include "axb/problems.hpp"
#include "axb/random.hpp"

namespace axbtest {

inline axb::DenseMatrix mat(std::size_t rows, std::size_t cols,
                            std::vector<double> data) {
  return axb::DenseMatrix(rows, cols, std::move(data));
}

inline double frob(const axb::DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

inline double frob_diff(const axb::DenseMatrix& a, const axb::DenseMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Random full-rank-by-construction Gaussian instance with planted solution.
struct SmallInstance {
  axb::DenseMatrix a, b, c;
};

inline SmallInstance random_consistent(std::size_t m, std::size_t p,
                                       std::size_t q, std::size_t n,
                                       std::uint64_t seed) {
  axb::RandomSource rng(seed);
  axb::DenseMatrix a = axb::random_gaussian(m, p, rng);
  axb::DenseMatrix b = axb::random_gaussian(q, n, rng);
  axb::DenseMatrix x = axb::random_gaussian(p, q, rng);
  return {a, b, axb::matmul(axb::matmul(a, x), b)};
}

inline SmallInstance random_inconsistent(std::size_t m, std::size_t p,
                                         std::size_t q, std::size_t n,
                                         double delta, std::uint64_t seed) {
  SmallInstance inst = random_consistent(m, p, q, n, seed);
  axb::RandomSource rng(seed + 7777);
  for (double& v : inst.c.data()) v += delta * rng.next_gaussian();
  return inst;
}

}  // namespace axbtest
