#pragma once

#include <cstddef>
#include <vector>

#include "axb/matrix.hpp"
#include "axb/random.hpp"

namespace axb {

enum class Axis { Row, Column };

double frobenius_norm_sq(const DenseMatrix& m);

// Per-row or per-column squared Euclidean norms.
std::vector<double> axis_norms_sq(const DenseMatrix& m, Axis axis);

// Precomputed discrete distribution over rows/columns, sampled by inverse CDF.
// Weights are squared norms; probabilities are weights[i]/total.
struct SamplingWeights {
  std::vector<double> weights;
  double total = 0.0;
  std::vector<double> cumulative;

  std::size_t size() const { return weights.size(); }
};

// Throws ZeroWeight if any entry is <= 0 (a zero row/column, which the
// algorithms assume away).
SamplingWeights build_weights(const std::vector<double>& norms_sq);

// Draws an index with probability weights[i]/total. Boundary draws resolve to
// the lower index.
std::size_t sample_index(const SamplingWeights& w, RandomSource& rng);

// RE = ||x - x_star||_F^2 / ||x_star||_F^2.
double relative_error(const DenseMatrix& x, const DenseMatrix& x_star);

}  // namespace axb
