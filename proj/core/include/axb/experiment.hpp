#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "axb/matrix.hpp"
#include "axb/problems.hpp"
#include "axb/report_io.hpp"
#include "axb/solvers.hpp"

namespace axb {

enum class Method { CmeRk, ImeRgs, ImeRekrk, ImeRekrgs, Drek, Dregs };

// CLI spellings: cme-rk, ime-rgs, ime-rekrk, ime-rekrgs, drek, dregs.
const char* method_name(Method m);
Method method_from_name(const std::string& name);  // throws BadSpec

SolveReport run_method(Method method, const DenseMatrix& a,
                       const DenseMatrix& b, const DenseMatrix& c,
                       const SolveConfig& cfg, const StoppingRule& stop);

// A multi-trial experiment on one problem. Either `problem` is set (synthetic
// instance regenerated per trial with seed = base_seed + trial) or a_file and
// b_file are set (fixed matrices; per-trial planted X and noise).
struct ExperimentConfig {
  Method method = Method::CmeRk;
  std::optional<ProblemSpec> problem;
  std::string a_file;
  std::string b_file;
  bool file_consistent = true;
  double file_delta = 0.1;
  bool transpose_a = false;  // applied to file-based A/B after load
  bool transpose_b = false;

  std::string instance_label;  // defaults to a spec- or file-derived name
  std::uint64_t trials = 20;
  double tol = 1e-6;
  std::uint64_t max_iters = 50000;
  std::uint64_t trace_every = 0;
  std::uint64_t base_seed = 0;

  std::string out_csv;    // empty = no file
  std::string out_trace;  // empty = no file
  std::size_t threads = 0;  // 0 = hardware concurrency
};

struct ExperimentSummary {
  std::string method;
  std::string instance;
  std::uint64_t trials = 0;
  std::uint64_t converged = 0;
  double convergence_fraction = 0.0;
  // Means over trials that did not hit max_iters; NaN when every trial did.
  double mean_it = 0.0;
  double mean_wall = 0.0;  // over all trials
  // Two-phase methods: mean K1 and K2, reported as "K1 + K2".
  std::optional<std::pair<double, double>> mean_phase_it;
  std::string it_display;  // "1600.9" or "3188.2 + 2962.7"
  std::vector<ReportRow> rows;
  std::vector<TraceRecord> traces;
};

// Runs cfg.trials independent solves (in parallel), stopping on oracle RE
// against the per-trial reference solution. Writes CSV/trace files when
// paths are set. Row order is by trial index regardless of scheduling.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

// One line in the style of the tables: method, instance, IT, CPU, fraction.
std::string format_summary(const ExperimentSummary& s);

// --- declarative experiment grids ---

struct GridCell {
  Method method = Method::CmeRk;
  ProblemSpec problem;
  std::string expect;  // "Y", "N", or "-" (skip: regime qualifier unmet)
  std::string label;
};

struct GridConfig {
  std::vector<GridCell> cells;
  std::uint64_t trials = 20;
  double tol = 1e-6;
  std::uint64_t max_iters = 50000;
  std::uint64_t base_seed = 0;
  std::string out_csv;
};

// JSON grid file: {"trials","tol","max_iters","base_seed","out_csv",
// "cells":[{"method","family","m","p","q","n","rank_a","rank_b","cond_a",
// "cond_b","consistent","delta","expect","label"}]}. Throws ParseError /
// BadSpec before any cell runs.
GridConfig parse_grid_file(const std::string& path);

struct GridCellResult {
  GridCell cell;
  std::string observed;  // "Y", "N", "?" (mixed), or "-" (skipped)
  bool pass = true;
  std::uint64_t converged = 0;
  std::uint64_t failed_high_re = 0;  // max_iters trials with RE > 1e-2
  double mean_it = 0.0;
};

struct GridRunResult {
  std::vector<GridCellResult> cells;
  bool all_pass = true;
  std::vector<ReportRow> rows;
};

// Runs every non-skipped cell (continuing past expectation failures), prints
// one pass/fail line per cell to log when non-null, writes the combined CSV
// when cfg.out_csv is set. A cell observes "Y" when at least 90% of trials
// converge, "N" when at least 90% stall above RE 1e-2 at the iteration cap.
GridRunResult run_matrix(const GridConfig& cfg, std::size_t threads = 0,
                         std::ostream* log = nullptr);

}  // namespace axb
