// Iteration-count anchors: each workload pins a reference mean IT from the
// benchmark protocol (tol 1e-6 on squared relative error, cap 50000). A run
// must land within a factor of two of the anchor and converge in at least
// 90% of trials.

#include <string>

#include "axb/experiment.hpp"
#include "doctest.h"

using axb::ExperimentConfig;
using axb::Method;
using axb::ProblemSpec;

namespace {

std::string fixture(const char* name) {
  return std::string(AXB_FIXTURE_DIR) + "/" + name;
}

ExperimentConfig protocol(Method method, std::uint64_t trials) {
  ExperimentConfig cfg;
  cfg.method = method;
  cfg.trials = trials;
  cfg.tol = 1e-6;
  cfg.max_iters = 50000;
  cfg.base_seed = 20240915;
  return cfg;
}

void check_anchor(const ExperimentConfig& cfg, double anchor) {
  auto summary = axb::run_experiment(cfg);
  INFO("instance ", summary.instance, " it ", summary.it_display,
       " conv ", summary.converged, "/", summary.trials);
  CHECK(summary.convergence_fraction >= 0.9);
  CHECK(summary.mean_it >= 0.5 * anchor);
  CHECK(summary.mean_it <= 2.0 * anchor);
}

ProblemSpec desk_dense(bool consistent) {
  ProblemSpec s;
  s.m = 100;
  s.p = 40;
  s.q = 40;
  s.n = 100;
  s.rank_a = 40;
  s.rank_b = 40;
  s.consistent = consistent;
  if (!consistent) s.noise_delta = 0.1;
  return s;
}

}  // namespace

TEST_CASE("cme-rk dense consistent anchor") {
  ExperimentConfig cfg = protocol(Method::CmeRk, 10);
  cfg.problem = desk_dense(true);
  check_anchor(cfg, 1600.9);
}

TEST_CASE("ime-rgs dense inconsistent anchor") {
  ExperimentConfig cfg = protocol(Method::ImeRgs, 10);
  cfg.problem = desk_dense(false);
  check_anchor(cfg, 1883.7);
}

TEST_CASE("ime-rekrgs large inconsistent anchor") {
  ExperimentConfig cfg = protocol(Method::ImeRekrgs, 5);
  ProblemSpec s;
  s.m = 500;
  s.p = 100;
  s.q = 100;
  s.n = 500;
  s.rank_a = 100;
  s.rank_b = 100;
  s.consistent = false;
  s.noise_delta = 0.1;
  cfg.problem = s;
  check_anchor(cfg, 2782.2);
}

TEST_CASE("ime-rekrk duplicated-A full-B anchor") {
  // A rank-deficient by duplication, B full column rank, noisy right side.
  ExperimentConfig cfg = protocol(Method::ImeRekrk, 5);
  ProblemSpec s;
  s.m = 1000;
  s.p = 200;
  s.rank_a = 100;
  s.q = 1000;
  s.n = 100;
  s.rank_b = 100;
  s.consistent = false;
  s.noise_delta = 0.1;
  cfg.problem = s;
  check_anchor(cfg, 2692.3);
}

TEST_CASE("drek spectrum-pinned anchor") {
  // Both factors full rank with condition number 5. The anchor's phase split
  // implies a looser phase-1 rule than the 100x-tighter oracle stop used
  // here, so this total is expected to sit above the factor-two window; the
  // assertion states the contract as written.
  ExperimentConfig cfg = protocol(Method::Drek, 5);
  ProblemSpec s;
  s.family = axb::Family::TypeII;
  s.m = 1000;
  s.p = 100;
  s.rank_a = 100;
  s.cond_a = 5.0;
  s.q = 1000;
  s.n = 100;
  s.rank_b = 100;
  s.cond_b = 5.0;
  s.consistent = false;
  s.noise_delta = 0.1;
  cfg.problem = s;
  check_anchor(cfg, 3188.2 + 2962.7);
}

TEST_CASE("dregs sparse-pair anchor") {
  // Same caveat as the drek anchor: the published split implies a looser
  // phase-1 rule, and the fixture matrices are reconstructions.
  ExperimentConfig cfg = protocol(Method::Dregs, 5);
  cfg.a_file = fixture("ash219.mtx");
  cfg.b_file = fixture("Worldcities.mtx");
  cfg.file_consistent = false;
  cfg.file_delta = 0.1;
  check_anchor(cfg, 2498.2 + 703.9);
}

TEST_CASE("cme-rk sparse consistent anchor") {
  ExperimentConfig cfg = protocol(Method::CmeRk, 10);
  cfg.a_file = fixture("ash219.mtx");
  cfg.b_file = fixture("divorce.mtx");
  cfg.transpose_b = true;
  check_anchor(cfg, 3522.4);
}
