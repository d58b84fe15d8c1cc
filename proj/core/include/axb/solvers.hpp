#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "axb/matrix.hpp"
#include "axb/oracle.hpp"
#include "axb/random.hpp"
#include "axb/sampling.hpp"

namespace axb {

// Accumulates the arithmetic cost of the rank-1 kernels, in flops.
struct FlopCount {
  std::uint64_t flops = 0;
};

// --- single-step projection kernels (in place) ---
// Each kernel applies exactly one rank-1 update. The *_norm_sq overloads are
// the trusting hot path; the convenience overloads compute the norm and
// throw ZeroRow/ZeroColumn when it vanishes.

// Y += A_{i,:}^T (C_{i,:} - A_{i,:} Y) / ||A_{i,:}||^2
void rk_row_step(DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& c,
                 std::size_t i, double row_norm_sq, FlopCount* fc = nullptr);
void rk_row_step(DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& c,
                 std::size_t i);

// X += (y_col - X B_{:,j}) B_{:,j}^T / ||B_{:,j}||^2, where y_col is read
// with the given stride (a column of a row-major p x n matrix has stride n).
void rk_col_step(DenseMatrix& x, const DenseMatrix& b, const double* y_col,
                 std::size_t y_stride, std::size_t j, double col_norm_sq,
                 FlopCount* fc = nullptr);
void rk_col_step(DenseMatrix& x, const DenseMatrix& b,
                 const std::vector<double>& y_col, std::size_t j);

// W = A_{:,j}^T R / ||A_{:,j}||^2; Y_{j,:} += W; R -= A_{:,j} W.
// w_out (length n) receives W so callers can maintain lagged buffers.
void rgs_col_step(DenseMatrix& y, DenseMatrix& r, const DenseMatrix& a,
                  std::size_t j, double col_norm_sq, double* w_out,
                  FlopCount* fc = nullptr);
void rgs_col_step(DenseMatrix& y, DenseMatrix& r, const DenseMatrix& a,
                  std::size_t j, std::vector<double>* w_out = nullptr);

// U = E B_{i,:}^T / ||B_{i,:}||^2; X_{:,i} += U; E -= U B_{i,:}.
void rgs_row_step(DenseMatrix& x, DenseMatrix& e, const DenseMatrix& b,
                  std::size_t i, double row_norm_sq, FlopCount* fc = nullptr);
void rgs_row_step(DenseMatrix& x, DenseMatrix& e, const DenseMatrix& b,
                  std::size_t i);

// Z -= A_{:,j} (A_{:,j}^T Z) / ||A_{:,j}||^2
void rek_z_step(DenseMatrix& z, const DenseMatrix& a, std::size_t j,
                double col_norm_sq, FlopCount* fc = nullptr);
void rek_z_step(DenseMatrix& z, const DenseMatrix& a, std::size_t j);

// Y += A_{i,:}^T (C_{i,:} - Z_{i,:} - A_{i,:} Y) / ||A_{i,:}||^2.
// When e is non-null the same rank-1 increment is accumulated into E.
void rek_y_step(DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& c,
                const DenseMatrix& z, std::size_t i, double row_norm_sq,
                DenseMatrix* e = nullptr, FlopCount* fc = nullptr);

// --- solve configuration and reporting ---

struct SolveConfig {
  std::uint64_t max_iters = 50000;
  double tol = 1e-6;
  std::uint64_t trace_every = 0;  // 0 = no trace
  std::uint64_t seed = 0;
  // Explicit phase budgets for the two-phase methods; when absent, phase 1
  // runs until its own criterion on Y (see solve_drek/solve_dregs).
  std::optional<std::pair<std::uint64_t, std::uint64_t>> phase_split;
  // Stopping rules are evaluated every re_check_every iterations and on the
  // final one.
  std::uint64_t re_check_every = 10;
};

enum class Termination { Converged, MaxIters, Stagnated };

const char* termination_name(Termination t);
Termination termination_from_name(const std::string& name);

struct SolveReport {
  DenseMatrix x_final;
  std::uint64_t iterations = 0;
  double wall_seconds = 0.0;
  std::optional<double> final_re;
  Termination terminated = Termination::MaxIters;
  // (iteration, RE) at multiples of trace_every; recorded only when an
  // oracle reference is available. Two-phase methods trace each phase
  // against that phase's own reference (Y*, then X*), iterations cumulative.
  std::vector<std::pair<std::uint64_t, double>> trace;
  // Set by the two-phase methods; iterations == first + second.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> phase_iterations;
  std::uint64_t flops = 0;
};

struct StoppingRule {
  enum class Mode { OracleRe, ResidualSurrogate };

  Mode mode = Mode::OracleRe;
  // Required for OracleRe; must have a nonzero x_star.
  const ReferenceSolution* reference = nullptr;
  // Window for the surrogate rule: stop with Stagnated when
  // ||X^k - X^{k-w}||_F / max(1, ||X^k||_F) < tol. The effective window is
  // w rounded up to a multiple of re_check_every.
  std::uint64_t window = 100;

  static StoppingRule oracle(const ReferenceSolution& ref) {
    StoppingRule s;
    s.mode = Mode::OracleRe;
    s.reference = &ref;
    return s;
  }
  static StoppingRule surrogate(std::uint64_t window = 100) {
    StoppingRule s;
    s.mode = Mode::ResidualSurrogate;
    s.window = window;
    return s;
  }
};

// --- per-method iteration state ---
// One step() call performs one full iteration of the corresponding
// algorithm, drawing indices in the listing order. Inputs must outlive the
// iteration object. Exposed so tests can observe iterates between steps;
// the solve_* drivers below add stopping, tracing, and timing.

class CmeRkIteration {
 public:
  CmeRkIteration(const DenseMatrix& a, const DenseMatrix& b,
                 const DenseMatrix& c);
  void step(RandomSource& rng);
  const DenseMatrix& x() const { return x_; }
  const DenseMatrix& y() const { return y_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& a_;
  const DenseMatrix& b_;
  const DenseMatrix& c_;
  SamplingWeights rows_a_;
  SamplingWeights cols_b_;
  std::vector<double> bcols_;  // column-major copy of B
  DenseMatrix y_;
  DenseMatrix x_;
  std::vector<double> scratch_;
  FlopCount fc_;
};

class ImeRgsIteration {
 public:
  ImeRgsIteration(const DenseMatrix& a, const DenseMatrix& b,
                  const DenseMatrix& c);
  void step(RandomSource& rng);
  const DenseMatrix& x() const { return x_; }
  const DenseMatrix& y() const { return y_; }
  const DenseMatrix& r() const { return r_; }
  const DenseMatrix& e() const { return e_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& a_;
  const DenseMatrix& b_;
  const DenseMatrix& c_;
  SamplingWeights cols_a_;
  SamplingWeights rows_b_;
  std::vector<double> acols_;  // column-major copy of A
  DenseMatrix y_;
  DenseMatrix r_;  // C - A Y, maintained incrementally
  DenseMatrix e_;  // lagged buffer feeding the X updates
  DenseMatrix x_;
  std::vector<double> w_buf_;
  FlopCount fc_;
};

class ImeRekrkIteration {
 public:
  ImeRekrkIteration(const DenseMatrix& a, const DenseMatrix& b,
                    const DenseMatrix& c);
  void step(RandomSource& rng);
  const DenseMatrix& x() const { return x_; }
  const DenseMatrix& y() const { return y_; }
  const DenseMatrix& z() const { return z_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& a_;
  const DenseMatrix& b_;
  const DenseMatrix& c_;
  SamplingWeights rows_a_;
  SamplingWeights cols_a_;
  SamplingWeights cols_b_;
  std::vector<double> acols_;
  std::vector<double> bcols_;
  DenseMatrix z_;
  DenseMatrix y_;
  DenseMatrix x_;
  std::vector<double> scratch_;
  FlopCount fc_;
};

class ImeRekrgsIteration {
 public:
  ImeRekrgsIteration(const DenseMatrix& a, const DenseMatrix& b,
                     const DenseMatrix& c);
  void step(RandomSource& rng);
  const DenseMatrix& x() const { return x_; }
  const DenseMatrix& y() const { return y_; }
  const DenseMatrix& z() const { return z_; }
  const DenseMatrix& e() const { return e_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& a_;
  const DenseMatrix& b_;
  const DenseMatrix& c_;
  SamplingWeights rows_a_;
  SamplingWeights cols_a_;
  SamplingWeights rows_b_;
  std::vector<double> acols_;
  DenseMatrix z_;
  DenseMatrix y_;
  DenseMatrix e_;
  DenseMatrix x_;
  std::vector<double> scratch_;
  FlopCount fc_;
};

// Double REK, phase 1: extended Kaczmarz on A Y = C.
class DrekPhase1 {
 public:
  DrekPhase1(const DenseMatrix& a, const DenseMatrix& c);
  void step(RandomSource& rng);
  const DenseMatrix& y() const { return y_; }
  const DenseMatrix& z() const { return z_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& a_;
  const DenseMatrix& c_;
  SamplingWeights rows_a_;
  SamplingWeights cols_a_;
  std::vector<double> acols_;
  DenseMatrix z_;
  DenseMatrix y_;
  std::vector<double> scratch_;
  FlopCount fc_;
};

// Double REK, phase 2: extended Kaczmarz on X B = Y^{K1}; W is the Z-iterate
// of the transposed system, started at (Y^{K1})^T.
class DrekPhase2 {
 public:
  DrekPhase2(const DenseMatrix& b, const DenseMatrix& y_fixed);
  void step(RandomSource& rng);
  const DenseMatrix& x() const { return x_; }
  const DenseMatrix& w() const { return w_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& b_;
  const DenseMatrix& y_;
  SamplingWeights rows_b_;
  SamplingWeights cols_b_;
  std::vector<double> bcols_;
  DenseMatrix w_;  // n x p
  DenseMatrix x_;
  std::vector<double> scratch_;
  FlopCount fc_;
};

// Double REGS, phase 1: extended Gauss-Seidel on A Y = C via (F, R).
class DregsPhase1 {
 public:
  DregsPhase1(const DenseMatrix& a, const DenseMatrix& c);
  void step(RandomSource& rng);
  const DenseMatrix& y() const { return y_; }
  const DenseMatrix& f() const { return f_; }
  const DenseMatrix& r() const { return r_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& a_;
  const DenseMatrix& c_;
  SamplingWeights rows_a_;
  SamplingWeights cols_a_;
  std::vector<double> acols_;
  DenseMatrix f_;
  DenseMatrix r_;
  DenseMatrix y_;
  std::vector<double> w_buf_;
  std::vector<double> scratch_;
  FlopCount fc_;
};

// Double REGS, phase 2: extended Gauss-Seidel on X B = Y^{K1} via (U, E).
class DregsPhase2 {
 public:
  DregsPhase2(const DenseMatrix& b, const DenseMatrix& y_fixed);
  void step(RandomSource& rng);
  const DenseMatrix& x() const { return x_; }
  const DenseMatrix& u() const { return u_; }
  const DenseMatrix& e() const { return e_; }
  const FlopCount& flop_count() const { return fc_; }

 private:
  const DenseMatrix& b_;
  SamplingWeights rows_b_;
  SamplingWeights cols_b_;
  std::vector<double> bcols_;
  DenseMatrix u_;
  DenseMatrix e_;
  DenseMatrix x_;
  FlopCount fc_;
};

// --- drivers ---
// All start from zero iterates, draw indices from RandomSource(cfg.seed),
// evaluate the stopping rule every cfg.re_check_every iterations and on the
// last one (reported iterations is the index of the first passing check),
// and record a trace point at multiples of cfg.trace_every.

SolveReport solve_cme_rk(const DenseMatrix& a, const DenseMatrix& b,
                         const DenseMatrix& c, const SolveConfig& cfg,
                         const StoppingRule& stop);

SolveReport solve_ime_rgs(const DenseMatrix& a, const DenseMatrix& b,
                          const DenseMatrix& c, const SolveConfig& cfg,
                          const StoppingRule& stop);

SolveReport solve_ime_rekrk(const DenseMatrix& a, const DenseMatrix& b,
                            const DenseMatrix& c, const SolveConfig& cfg,
                            const StoppingRule& stop);

SolveReport solve_ime_rekrgs(const DenseMatrix& a, const DenseMatrix& b,
                             const DenseMatrix& c, const SolveConfig& cfg,
                             const StoppingRule& stop);

// Two-phase methods. Without cfg.phase_split, phase 1 stops when its own
// criterion on Y reaches tol * 1e-2 (tight enough that the floor phase 2
// inherits from the fixed Y^{K1} sits below tol), then phase 2 targets tol
// on X; cfg.max_iters is the combined budget. With cfg.phase_split, phase 1
// runs exactly K1 iterations and phase 2 at most K2.
SolveReport solve_drek(const DenseMatrix& a, const DenseMatrix& b,
                       const DenseMatrix& c, const SolveConfig& cfg,
                       const StoppingRule& stop);

SolveReport solve_dregs(const DenseMatrix& a, const DenseMatrix& b,
                        const DenseMatrix& c, const SolveConfig& cfg,
                        const StoppingRule& stop);

}  // namespace axb
