#include "axb/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "axb/sampling.hpp"
#include "eigen_convert.hpp"

namespace axb {
namespace {

double rank_cutoff(const Eigen::MatrixXd& m, double sigma_max) {
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * sigma_max;
}

// Minimal-norm least-squares pseudoinverse with the shared cutoff rule.
Eigen::MatrixXd pinv_eigen(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rank_cutoff(m, s(0)) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

DenseMatrix pseudoinverse(const DenseMatrix& m) {
  if (m.empty() || frobenius_norm_sq(m) == 0.0) {
    throw Error(ErrorCode::ZeroMatrix, "pseudoinverse: zero matrix");
  }
  return from_eigen(pinv_eigen(to_eigen(m)));
}

std::vector<double> singular_values(const DenseMatrix& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const Eigen::VectorXd& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

std::size_t numerical_rank(const DenseMatrix& m) {
  if (m.empty()) return 0;
  Eigen::MatrixXd e = to_eigen(m);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(e);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cutoff = rank_cutoff(e, s(0));
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return rank;
}

ReferenceSolution reference_solution(const DenseMatrix& a,
                                     const DenseMatrix& b,
                                     const DenseMatrix& c) {
  if (a.rows() != c.rows() || b.cols() != c.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                "reference_solution: A, B, C shapes not conformable");
  }
  Eigen::MatrixXd ae = to_eigen(a);
  Eigen::MatrixXd be = to_eigen(b);
  Eigen::MatrixXd ce = to_eigen(c);
  Eigen::MatrixXd a_pinv = pinv_eigen(ae);
  Eigen::MatrixXd b_pinv = pinv_eigen(be);

  ReferenceSolution ref;
  Eigen::MatrixXd y_star = a_pinv * ce;
  Eigen::MatrixXd x_star = y_star * b_pinv;
  ref.x_star = from_eigen(x_star);
  ref.y_star = from_eigen(y_star);
  ref.z_star = from_eigen(ce - ae * y_star);
  const double residual = (ae * x_star * be - ce).norm();
  ref.consistent = residual <= 1e-8 * std::max(1.0, ce.norm());
  return ref;
}

SpectralProfile spectral_profile(const DenseMatrix& a, const DenseMatrix& b) {
  SpectralProfile prof;
  prof.frob_sq_a = frobenius_norm_sq(a);
  prof.frob_sq_b = frobenius_norm_sq(b);
  if (prof.frob_sq_a == 0.0 || prof.frob_sq_b == 0.0) {
    throw Error(ErrorCode::ZeroMatrix, "spectral_profile: zero matrix");
  }

  auto min_max_nonzero = [](const DenseMatrix& m, double& s_min,
                            double& s_max) {
    Eigen::MatrixXd e = to_eigen(m);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(e);
    const Eigen::VectorXd& s = svd.singularValues();
    s_max = s(0);
    const double cutoff = rank_cutoff(e, s_max);
    s_min = s_max;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > cutoff) s_min = s(i);
  };
  min_max_nonzero(a, prof.sigma_min_a, prof.sigma_max_a);
  min_max_nonzero(b, prof.sigma_min_b, prof.sigma_max_b);
  prof.rho1 = 1.0 - prof.sigma_min_a * prof.sigma_min_a / prof.frob_sq_a;
  prof.rho2 = 1.0 - prof.sigma_min_b * prof.sigma_min_b / prof.frob_sq_b;
  return prof;
}

namespace {
constexpr double kCaseEqualTol = 1e-12;
}

double eta_factor(const SpectralProfile& profile, std::uint64_t k) {
  const double r1 = profile.rho1;
  const double r2 = profile.rho2;
  if (std::abs(r1 - r2) <= kCaseEqualTol) return static_cast<double>(k);
  if (r1 < r2) return r1 / (r2 - r1);
  return r1 / (r1 - r2) *
         (std::pow(r1 / r2, static_cast<double>(k)) - 1.0);
}

double gamma_factor(const SpectralProfile& profile, std::uint64_t k) {
  const double r1 = profile.rho1;
  const double r2 = profile.rho2;
  const double kd = static_cast<double>(k);
  if (std::abs(r1 - r2) <= kCaseEqualTol) return kd * (kd + 1.0) / 2.0;
  if (r1 < r2) return r1 * r2 / ((r2 - r1) * (r2 - r1));
  return kd * r1 / (r1 - r2) * std::pow(r1 / r2, kd);
}

double bound_cme_rk(const SpectralProfile& profile, std::uint64_t k,
                    double init_err) {
  const double eta = eta_factor(profile, k);
  const double lead =
      1.0 + profile.sigma_max_b * profile.sigma_max_b * eta / profile.frob_sq_b;
  return lead * std::pow(profile.rho2, static_cast<double>(k)) * init_err;
}

DenseMatrix kron_vec_solution(const DenseMatrix& a, const DenseMatrix& b,
                              const DenseMatrix& c) {
  if (a.rows() != c.rows() || b.cols() != c.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                "kron_vec_solution: A, B, C shapes not conformable");
  }
  const std::size_t m = a.rows(), p = a.cols();
  const std::size_t q = b.rows(), n = b.cols();
  if (static_cast<double>(m) * static_cast<double>(n) *
          static_cast<double>(p) * static_cast<double>(q) >
      1e6) {
    throw Error(ErrorCode::TooLarge, "kron_vec_solution: system exceeds 1e6");
  }

  // vec() stacks columns; (B^T kron A) vec(X) = vec(A X B).
  Eigen::MatrixXd k_mat(m * n, p * q);
  for (std::size_t jb = 0; jb < q; ++jb)       // B^T column index
    for (std::size_t ib = 0; ib < n; ++ib)     // B^T row index
      for (std::size_t ja = 0; ja < p; ++ja)
        for (std::size_t ia = 0; ia < m; ++ia)
          k_mat(static_cast<Eigen::Index>(ib * m + ia),
                static_cast<Eigen::Index>(jb * p + ja)) =
              b(jb, ib) * a(ia, ja);

  Eigen::VectorXd c_vec(m * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      c_vec(static_cast<Eigen::Index>(j * m + i)) = c(i, j);

  Eigen::VectorXd x_vec = pinv_eigen(k_mat) * c_vec;
  DenseMatrix x(p, q);
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < p; ++i)
      x(i, j) = x_vec(static_cast<Eigen::Index>(j * p + i));
  return x;
}

}  // namespace axb
