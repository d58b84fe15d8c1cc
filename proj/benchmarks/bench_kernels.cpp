// Microbenchmarks for the hot paths: the rank-1 projection kernels, index
// sampling, and one full iteration of each solver at the dense desk scale
// (m,p,q,n) = (100,40,40,100).

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "axb/problems.hpp"
#include "axb/random.hpp"
#include "axb/sampling.hpp"
#include "axb/solvers.hpp"

namespace {

constexpr std::size_t kM = 100;
constexpr std::size_t kP = 40;
constexpr std::size_t kQ = 40;
constexpr std::size_t kN = 100;

axb::ProblemInstance desk_instance() {
  axb::ProblemSpec spec;
  spec.m = kM;
  spec.p = kP;
  spec.q = kQ;
  spec.n = kN;
  spec.rank_a = kP;
  spec.rank_b = kQ;
  spec.seed = 1234;
  return axb::generate(spec);
}

void bm_rk_row_step(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  axb::DenseMatrix y(kP, kN);
  std::size_t i = 0;
  for (auto _ : state) {
    axb::rk_row_step(y, inst.a, inst.c, i);
    i = (i + 1) % kM;
  }
  benchmark::DoNotOptimize(y(0, 0));
}
BENCHMARK(bm_rk_row_step);

void bm_rk_col_step(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  axb::DenseMatrix x(kP, kQ);
  std::vector<double> y_col(kP, 1.0);
  std::size_t j = 0;
  for (auto _ : state) {
    axb::rk_col_step(x, inst.b, y_col, j);
    j = (j + 1) % kN;
  }
  benchmark::DoNotOptimize(x(0, 0));
}
BENCHMARK(bm_rk_col_step);

void bm_rgs_col_step(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  axb::DenseMatrix y(kP, kN);
  axb::DenseMatrix r = inst.c;
  std::vector<double> w(kN);
  std::size_t j = 0;
  for (auto _ : state) {
    axb::rgs_col_step(y, r, inst.a, j, &w);
    j = (j + 1) % kP;
  }
  benchmark::DoNotOptimize(y(0, 0));
}
BENCHMARK(bm_rgs_col_step);

void bm_rgs_row_step(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  axb::DenseMatrix x(kP, kQ);
  axb::DenseMatrix e(kP, kN);
  for (std::size_t i = 0; i < kP; ++i) {
    for (std::size_t j = 0; j < kN; ++j) {
      e(i, j) = 1.0;
    }
  }
  std::size_t i = 0;
  for (auto _ : state) {
    axb::rgs_row_step(x, e, inst.b, i);
    i = (i + 1) % kQ;
  }
  benchmark::DoNotOptimize(x(0, 0));
}
BENCHMARK(bm_rgs_row_step);

void bm_rek_z_step(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  axb::DenseMatrix z = inst.c;
  std::size_t j = 0;
  for (auto _ : state) {
    axb::rek_z_step(z, inst.a, j);
    j = (j + 1) % kP;
  }
  benchmark::DoNotOptimize(z(0, 0));
}
BENCHMARK(bm_rek_z_step);

void bm_sample_index(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  const axb::SamplingWeights w =
      axb::build_weights(axb::axis_norms_sq(inst.a, axb::Axis::Row));
  axb::RandomSource rng(99);
  for (auto _ : state) {
    benchmark::DoNotOptimize(axb::sample_index(w, rng));
  }
}
BENCHMARK(bm_sample_index);

template <typename Iteration>
void bm_full_iteration(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  Iteration it(inst.a, inst.b, inst.c);
  axb::RandomSource rng(7);
  for (auto _ : state) {
    it.step(rng);
  }
  benchmark::DoNotOptimize(it.x()(0, 0));
}
BENCHMARK(bm_full_iteration<axb::CmeRkIteration>)->Name("bm_iter_cme_rk");
BENCHMARK(bm_full_iteration<axb::ImeRgsIteration>)->Name("bm_iter_ime_rgs");
BENCHMARK(bm_full_iteration<axb::ImeRekrkIteration>)->Name("bm_iter_ime_rekrk");
BENCHMARK(bm_full_iteration<axb::ImeRekrgsIteration>)
    ->Name("bm_iter_ime_rekrgs");

void bm_drek_phase1(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  axb::DrekPhase1 it(inst.a, inst.c);
  axb::RandomSource rng(7);
  for (auto _ : state) {
    it.step(rng);
  }
  benchmark::DoNotOptimize(it.y()(0, 0));
}
BENCHMARK(bm_drek_phase1);

void bm_dregs_phase1(benchmark::State& state) {
  const axb::ProblemInstance inst = desk_instance();
  axb::DregsPhase1 it(inst.a, inst.c);
  axb::RandomSource rng(7);
  for (auto _ : state) {
    it.step(rng);
  }
  benchmark::DoNotOptimize(it.y()(0, 0));
}
BENCHMARK(bm_dregs_phase1);

}  // namespace

BENCHMARK_MAIN();
