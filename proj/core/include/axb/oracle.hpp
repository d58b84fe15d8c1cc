#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "axb/matrix.hpp"

namespace axb {

// Ground truth for AXB=C computed by SVD. Used by tests and the experiment
// harness; the iterative solvers never call into this header's machinery.
struct ReferenceSolution {
  DenseMatrix x_star;  // A+ C B+, the minimal F-norm least-squares solution
  DenseMatrix y_star;  // A+ C
  DenseMatrix z_star;  // (I - A A+) C
  bool consistent = false;
};

struct SpectralProfile {
  double sigma_min_a = 0.0;  // smallest nonzero singular value
  double sigma_max_a = 0.0;
  double sigma_min_b = 0.0;
  double sigma_max_b = 0.0;
  double frob_sq_a = 0.0;
  double frob_sq_b = 0.0;
  double rho1 = 0.0;  // 1 - sigma_min(A)^2 / ||A||_F^2
  double rho2 = 0.0;  // 1 - sigma_min(B)^2 / ||B||_F^2
};

// Moore-Penrose pseudoinverse via SVD with the standard numerical-rank
// cutoff max(rows, cols) * eps * sigma_max.
DenseMatrix pseudoinverse(const DenseMatrix& m);

// Singular values in descending order.
std::vector<double> singular_values(const DenseMatrix& m);

std::size_t numerical_rank(const DenseMatrix& m);

ReferenceSolution reference_solution(const DenseMatrix& a,
                                     const DenseMatrix& b,
                                     const DenseMatrix& c);

SpectralProfile spectral_profile(const DenseMatrix& a, const DenseMatrix& b);

// Three-case bound factors. The rho1==rho2 branch is taken when
// |rho1 - rho2| <= 1e-12.
double eta_factor(const SpectralProfile& profile, std::uint64_t k);
double gamma_factor(const SpectralProfile& profile, std::uint64_t k);

// Expected-error bound for the alternating row/column projection method:
// (1 + sigma_max(B)^2 * eta(k) / ||B||_F^2) * rho2^k * init_err.
double bound_cme_rk(const SpectralProfile& profile, std::uint64_t k,
                    double init_err);

// Solves the vectorized system (B^T kron A) vec(X) = vec(C) by pseudoinverse.
// Cross-check only; throws TooLarge when m*n*p*q > 1e6.
DenseMatrix kron_vec_solution(const DenseMatrix& a, const DenseMatrix& b,
                              const DenseMatrix& c);

}  // namespace axb
