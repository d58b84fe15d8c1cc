#include "axb/problems.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <algorithm>
#include <string>

#include "eigen_convert.hpp"

namespace axb {

void ProblemSpec::validate() const {
  if (m < 1 || p < 1 || q < 1 || n < 1) {
    throw Error(ErrorCode::BadSpec, "ProblemSpec: dimensions must be >= 1");
  }
  if (rank_a < 1 || rank_a > std::min(m, p)) {
    throw Error(ErrorCode::BadSpec, "ProblemSpec: rank_a out of range");
  }
  if (rank_b < 1 || rank_b > std::min(q, n)) {
    throw Error(ErrorCode::BadSpec, "ProblemSpec: rank_b out of range");
  }
  if (family == Family::TypeI) {
    // Rank deficiency comes only from the duplication construction.
    const bool full_a = rank_a == std::min(m, p);
    const bool half_a = p % 2 == 0 && rank_a == p / 2 && p / 2 <= m;
    if (!full_a && !half_a) {
      throw Error(ErrorCode::BadSpec,
                  "ProblemSpec: Type I rank_a must be min(m,p) or p/2");
    }
    const bool full_b = rank_b == std::min(q, n);
    const bool half_b = q % 2 == 0 && rank_b == q / 2 && q / 2 <= n;
    if (!full_b && !half_b) {
      throw Error(ErrorCode::BadSpec,
                  "ProblemSpec: Type I rank_b must be min(q,n) or q/2");
    }
  } else {
    if (cond_a < 1.0 || cond_b < 1.0) {
      throw Error(ErrorCode::BadSpec,
                  "ProblemSpec: Type II condition numbers must be >= 1");
    }
    if (rank_a < 2 || rank_b < 2) {
      throw Error(ErrorCode::BadSpec,
                  "ProblemSpec: Type II ranks must be >= 2");
    }
  }
  if (consistent) {
    if (noise_delta) {
      throw Error(ErrorCode::BadSpec,
                  "ProblemSpec: noise_delta set on a consistent spec");
    }
  } else {
    if (!noise_delta || !(*noise_delta > 0.0 && *noise_delta < 1.0)) {
      throw Error(ErrorCode::BadSpec,
                  "ProblemSpec: inconsistent spec needs noise_delta in (0,1)");
    }
  }
}

DenseMatrix random_gaussian(std::size_t rows, std::size_t cols,
                            RandomSource& rng) {
  DenseMatrix g(rows, cols);
  for (double& v : g.data()) v = rng.next_gaussian();
  return g;
}

DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols,
                               RandomSource& rng) {
  if (cols > rows || rows < 1 || cols < 1) {
    throw Error(ErrorCode::BadShape,
                "random_orthonormal: need 1 <= cols <= rows, got " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  Eigen::MatrixXd g = to_eigen(random_gaussian(rows, cols, rng));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd thin_q =
      qr.householderQ() *
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(rows),
                                static_cast<Eigen::Index>(cols));
  return from_eigen(thin_q);
}

std::pair<DenseMatrix, DenseMatrix> make_rhs(const DenseMatrix& a,
                                             const DenseMatrix& b,
                                             bool consistent, double delta,
                                             RandomSource& rng) {
  if (!consistent && !(delta >= 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::BadSpec, "make_rhs: delta must lie in [0,1)");
  }
  DenseMatrix planted = random_gaussian(a.cols(), b.rows(), rng);
  Eigen::MatrixXd c = to_eigen(a) * to_eigen(planted) * to_eigen(b);
  if (!consistent && delta > 0.0) {
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j)
        c(i, j) += delta * rng.next_gaussian();
  }
  return {from_eigen(c), std::move(planted)};
}

namespace {

DenseMatrix type1_matrix(std::size_t rows, std::size_t cols, std::size_t rank,
                         bool dup_cols, RandomSource& rng) {
  if (rank == std::min(rows, cols)) {
    return random_gaussian(rows, cols, rng);
  }
  if (dup_cols) {
    // A = [A1, A1] with A1 = randn(rows, cols/2).
    DenseMatrix half = random_gaussian(rows, cols / 2, rng);
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        out(i, j) = half(i, j % (cols / 2));
    return out;
  }
  // B = [B1; B1] with B1 = randn(rows/2, cols).
  DenseMatrix half = random_gaussian(rows / 2, cols, rng);
  DenseMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = half(i % (rows / 2), j);
  return out;
}

DenseMatrix type2_matrix(std::size_t rows, std::size_t cols, std::size_t rank,
                         double cond, RandomSource& rng) {
  DenseMatrix u = random_orthonormal(rows, rank, rng);
  DenseMatrix v = random_orthonormal(cols, rank, rng);
  // sigma_min pinned at 1, sigma_max = cond; the last two diagonal entries
  // carry the extremes, the rest are uniform in [1, cond].
  std::vector<double> d(rank);
  for (std::size_t i = 0; i + 2 < rank; ++i)
    d[i] = 1.0 + rng.next_unit() * (cond - 1.0);
  d[rank - 2] = cond;
  d[rank - 1] = 1.0;
  DenseMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < rank; ++k) sum += u(i, k) * d[k] * v(j, k);
      out(i, j) = sum;
    }
  return out;
}

ProblemInstance finish(const ProblemSpec& spec, DenseMatrix a, DenseMatrix b,
                       RandomSource& rng) {
  ProblemInstance inst;
  auto [c, planted] = make_rhs(
      a, b, spec.consistent,
      spec.noise_delta ? *spec.noise_delta : 0.0, rng);
  inst.a = std::move(a);
  inst.b = std::move(b);
  inst.c = std::move(c);
  inst.planted_x = std::move(planted);
  inst.spec = spec;
  return inst;
}

}  // namespace

ProblemInstance gen_type1(const ProblemSpec& spec, RandomSource& rng) {
  spec.validate();
  if (spec.family != Family::TypeI) {
    throw Error(ErrorCode::BadSpec, "gen_type1: spec family is not Type I");
  }
  DenseMatrix a = type1_matrix(spec.m, spec.p, spec.rank_a, true, rng);
  DenseMatrix b = type1_matrix(spec.q, spec.n, spec.rank_b, false, rng);
  return finish(spec, std::move(a), std::move(b), rng);
}

ProblemInstance gen_type2(const ProblemSpec& spec, RandomSource& rng) {
  spec.validate();
  if (spec.family != Family::TypeII) {
    throw Error(ErrorCode::BadSpec, "gen_type2: spec family is not Type II");
  }
  DenseMatrix a = type2_matrix(spec.m, spec.p, spec.rank_a, spec.cond_a, rng);
  DenseMatrix b = type2_matrix(spec.q, spec.n, spec.rank_b, spec.cond_b, rng);
  return finish(spec, std::move(a), std::move(b), rng);
}

ProblemInstance generate(const ProblemSpec& spec) {
  RandomSource rng(spec.seed);
  return spec.family == Family::TypeI ? gen_type1(spec, rng)
                                      : gen_type2(spec, rng);
}

}  // namespace axb
