#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "axb/matrix.hpp"
#include "axb/random.hpp"

namespace axb {

enum class Family { TypeI, TypeII };

// Synthetic instance recipe. Type I is plain Gaussian; rank deficiency only
// through the duplication construction (A = [A1, A1] with A1 = randn(m, p/2),
// B = [B1; B1] with B1 = randn(q/2, n)), so rank_a must be min(m,p) or p/2
// and rank_b must be min(q,n) or q/2. Type II pins the spectrum: sigma_min
// fixed at 1, sigma_max = cond, interior singular values uniform in between.
struct ProblemSpec {
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t n = 0;
  std::size_t rank_a = 0;
  std::size_t rank_b = 0;
  double cond_a = 1.0;  // Type II only
  double cond_b = 1.0;
  Family family = Family::TypeI;
  bool consistent = true;
  std::optional<double> noise_delta;  // required iff inconsistent, in (0,1)
  std::uint64_t seed = 0;

  // Throws BadSpec when any invariant fails.
  void validate() const;
};

struct ProblemInstance {
  DenseMatrix a;
  DenseMatrix b;
  DenseMatrix c;
  DenseMatrix planted_x;  // the X used to build C
  ProblemSpec spec;
};

// Standard-normal matrix; entries drawn row-major from rng.
DenseMatrix random_gaussian(std::size_t rows, std::size_t cols,
                            RandomSource& rng);

// Orthonormal columns via QR of a Gaussian matrix. Requires cols <= rows.
DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols,
                               RandomSource& rng);

// planted_x ~ randn(p, q); C = A planted_x B, plus delta * randn(m, n) when
// inconsistent. delta = 0 with consistent=false degenerates to the consistent
// construction.
std::pair<DenseMatrix, DenseMatrix> make_rhs(const DenseMatrix& a,
                                             const DenseMatrix& b,
                                             bool consistent, double delta,
                                             RandomSource& rng);

// Draw order is fixed (A, then B, then planted X, then noise) so instances
// are reproducible from the seed alone.
ProblemInstance gen_type1(const ProblemSpec& spec, RandomSource& rng);
ProblemInstance gen_type2(const ProblemSpec& spec, RandomSource& rng);

// Dispatch on spec.family with RandomSource(spec.seed).
ProblemInstance generate(const ProblemSpec& spec);

}  // namespace axb
