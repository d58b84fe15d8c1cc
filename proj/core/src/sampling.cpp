#include "axb/sampling.hpp"

#include <algorithm>
#include <string>

namespace axb {

double frobenius_norm_sq(const DenseMatrix& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v * v;
  return sum;
}

std::vector<double> axis_norms_sq(const DenseMatrix& m, Axis axis) {
  const std::size_t count = axis == Axis::Row ? m.rows() : m.cols();
  std::vector<double> norms(count, 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row(i);
    if (axis == Axis::Row) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m.cols(); ++j) sum += row[j] * row[j];
      norms[i] = sum;
    } else {
      for (std::size_t j = 0; j < m.cols(); ++j) norms[j] += row[j] * row[j];
    }
  }
  return norms;
}

SamplingWeights build_weights(const std::vector<double>& norms_sq) {
  SamplingWeights w;
  w.weights = norms_sq;
  w.cumulative.resize(norms_sq.size());
  double running = 0.0;
  for (std::size_t i = 0; i < norms_sq.size(); ++i) {
    if (!(norms_sq[i] > 0.0)) {
      throw Error(ErrorCode::ZeroWeight,
                  "build_weights: weight " + std::to_string(i) +
                      " is not positive");
    }
    running += norms_sq[i];
    w.cumulative[i] = running;
  }
  w.total = running;
  return w;
}

std::size_t sample_index(const SamplingWeights& w, RandomSource& rng) {
  const double u = rng.next_unit() * w.total;
  auto it = std::lower_bound(w.cumulative.begin(), w.cumulative.end(), u);
  if (it == w.cumulative.end()) return w.cumulative.size() - 1;
  return static_cast<std::size_t>(it - w.cumulative.begin());
}

double relative_error(const DenseMatrix& x, const DenseMatrix& x_star) {
  if (!x.same_shape(x_star)) {
    throw Error(ErrorCode::ShapeMismatch, "relative_error: shape mismatch");
  }
  const double denom = frobenius_norm_sq(x_star);
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::ZeroReference, "relative_error: zero reference");
  }
  double num = 0.0;
  const std::vector<double>& xd = x.data();
  const std::vector<double>& sd = x_star.data();
  for (std::size_t i = 0; i < xd.size(); ++i) {
    const double d = xd[i] - sd[i];
    num += d * d;
  }
  return num / denom;
}

}  // namespace axb
