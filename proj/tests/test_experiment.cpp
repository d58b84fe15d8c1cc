#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "axb/experiment.hpp"
#include "axb/matrix.hpp"
#include "axb/report_io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using axb::ExperimentConfig;
using axb::Error;
using axb::ErrorCode;
using axb::GridCell;
using axb::GridConfig;
using axb::Method;
using axb::ProblemSpec;
using axb::Termination;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("axbtest-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
  REQUIRE(out.good());
}

std::string identity_mm(std::size_t n) {
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate real general\n"
     << n << " " << n << " " << n << "\n";
  for (std::size_t i = 1; i <= n; ++i) os << i << " " << i << " 1\n";
  return os.str();
}

ProblemSpec small_spec() {
  ProblemSpec s;
  s.m = 10;
  s.p = 4;
  s.q = 3;
  s.n = 8;
  s.rank_a = 4;
  s.rank_b = 3;
  return s;
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  TempDir dir;
  const std::string out_path = dir.file("cli-out.txt");
  const std::string cmd =
      std::string(AXB_BENCH_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  res.output = buf.str();
  return res;
}

}  // namespace

TEST_CASE("method names round-trip") {
  const char* names[] = {"cme-rk", "ime-rgs",    "ime-rekrk",
                         "ime-rekrgs", "drek", "dregs"};
  const Method methods[] = {Method::CmeRk,     Method::ImeRgs,
                            Method::ImeRekrk,  Method::ImeRekrgs,
                            Method::Drek,      Method::Dregs};
  for (int i = 0; i < 6; ++i) {
    CHECK(axb::method_name(methods[i]) == std::string(names[i]));
    CHECK(axb::method_from_name(names[i]) == methods[i]);
  }
  try {
    axb::method_from_name("gauss-seidel");
    FAIL_CHECK("expected BadSpec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadSpec);
    CHECK(std::string(e.what()).find("cme-rk") != std::string::npos);
  }
}

TEST_CASE("run_method dispatches every solver") {
  auto inst = axbtest::random_consistent(8, 3, 2, 6, 42);
  auto ref = axb::reference_solution(inst.a, inst.b, inst.c);
  axb::SolveConfig cfg;
  cfg.tol = 1e-8;
  cfg.max_iters = 30000;
  cfg.seed = 5;
  for (Method m : {Method::CmeRk, Method::ImeRgs, Method::ImeRekrk,
                   Method::ImeRekrgs, Method::Drek, Method::Dregs}) {
    CAPTURE(axb::method_name(m));
    auto rep = axb::run_method(m, inst.a, inst.b, inst.c, cfg,
                               axb::StoppingRule::oracle(ref));
    CHECK(rep.terminated == Termination::Converged);
  }
}

TEST_CASE("run_experiment on a synthetic spec") {
  ExperimentConfig cfg;
  cfg.method = Method::CmeRk;
  cfg.problem = small_spec();
  cfg.trials = 5;
  cfg.tol = 1e-8;
  cfg.max_iters = 30000;
  cfg.base_seed = 77;
  cfg.threads = 2;
  auto summary = axb::run_experiment(cfg);

  CHECK(summary.method == "cme-rk");
  CHECK(summary.instance == "type1-10x4r4-3x8r3-con");
  CHECK(summary.trials == 5);
  CHECK(summary.converged == 5);
  CHECK(summary.convergence_fraction == 1.0);
  REQUIRE(summary.rows.size() == 5);

  double it_sum = 0.0, wall_sum = 0.0;
  for (std::size_t t = 0; t < 5; ++t) {
    const auto& row = summary.rows[t];
    CHECK(row.method == "cme-rk");
    CHECK(row.instance == summary.instance);
    CHECK(row.m == 10);
    CHECK(row.p == 4);
    CHECK(row.r1 == 4);
    CHECK(row.q == 3);
    CHECK(row.n == 8);
    CHECK(row.r2 == 3);
    CHECK(row.trial == t);
    CHECK(row.seed == 77 + t);
    CHECK(row.terminated == Termination::Converged);
    REQUIRE(row.final_re.has_value());
    CHECK(*row.final_re < 1e-8);
    it_sum += static_cast<double>(row.iters);
    wall_sum += row.wall_seconds;
  }
  CHECK(summary.mean_it == doctest::Approx(it_sum / 5.0).epsilon(1e-12));
  CHECK(summary.mean_wall == doctest::Approx(wall_sum / 5.0).epsilon(1e-12));

  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", it_sum / 5.0);
  CHECK(summary.it_display == buf);
  CHECK(!summary.mean_phase_it.has_value());

  const std::string line = axb::format_summary(summary);
  CHECK(line.find("cme-rk") != std::string::npos);
  CHECK(line.find(summary.it_display) != std::string::npos);
  CHECK(line.find("conv 5/5") != std::string::npos);
}

TEST_CASE("run_experiment repeats bit-for-bit except wall time") {
  ExperimentConfig cfg;
  cfg.method = Method::ImeRekrgs;
  cfg.problem = small_spec();
  cfg.problem->consistent = false;
  cfg.problem->noise_delta = 0.1;
  cfg.trials = 4;
  cfg.tol = 1e-7;
  cfg.max_iters = 40000;
  cfg.base_seed = 9;
  cfg.trace_every = 500;
  auto s1 = axb::run_experiment(cfg);
  cfg.threads = 1;
  auto s2 = axb::run_experiment(cfg);

  CHECK(s1.instance == "type1-10x4r4-3x8r3-inc-d0.1");
  REQUIRE(s1.rows.size() == s2.rows.size());
  for (std::size_t t = 0; t < s1.rows.size(); ++t) {
    CHECK(s1.rows[t].iters == s2.rows[t].iters);
    CHECK(s1.rows[t].seed == s2.rows[t].seed);
    REQUIRE(s1.rows[t].final_re.has_value() ==
            s2.rows[t].final_re.has_value());
    if (s1.rows[t].final_re) {
      CHECK(*s1.rows[t].final_re == *s2.rows[t].final_re);
    }
    CHECK(s1.rows[t].terminated == s2.rows[t].terminated);
  }
  CHECK(s1.it_display == s2.it_display);
  REQUIRE(s1.traces.size() == s2.traces.size());
  for (std::size_t i = 0; i < s1.traces.size(); ++i) {
    CHECK(s1.traces[i].trial == s2.traces[i].trial);
    CHECK(s1.traces[i].k == s2.traces[i].k);
    CHECK(s1.traces[i].re == s2.traces[i].re);
  }
}

TEST_CASE("run_experiment with matrix files") {
  TempDir dir;
  write_file(dir.file("eyeA.mtx"), identity_mm(5));
  write_file(dir.file("eyeB.mtx"), identity_mm(4));

  ExperimentConfig cfg;
  cfg.method = Method::ImeRgs;
  cfg.a_file = dir.file("eyeA.mtx");
  cfg.b_file = dir.file("eyeB.mtx");
  cfg.trials = 3;
  cfg.tol = 1e-9;
  cfg.max_iters = 20000;
  cfg.base_seed = 11;
  cfg.out_csv = dir.file("rows.csv");
  auto summary = axb::run_experiment(cfg);

  CHECK(summary.instance == "eyeA-eyeB-con");
  CHECK(summary.converged == 3);
  CHECK(summary.convergence_fraction == 1.0);
  REQUIRE(summary.rows.size() == 3);
  CHECK(summary.rows[0].m == 5);
  CHECK(summary.rows[0].p == 5);
  CHECK(summary.rows[0].r1 == 5);
  CHECK(summary.rows[0].q == 4);
  CHECK(summary.rows[0].n == 4);
  CHECK(summary.rows[0].r2 == 4);

  std::ifstream csv(cfg.out_csv);
  REQUIRE(csv.good());
  auto parsed = axb::parse_report_csv(csv);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[1].seed == 12);

  SUBCASE("transpose flags change the loaded shape and the label") {
    std::ostringstream rect;
    rect << "%%MatrixMarket matrix array real general\n2 3\n";
    for (int i = 1; i <= 6; ++i) rect << i << "\n";
    write_file(dir.file("rect.mtx"), rect.str());
    ExperimentConfig tc = cfg;
    tc.method = Method::Drek;
    tc.a_file = dir.file("rect.mtx");
    tc.transpose_a = true;
    tc.b_file = dir.file("eyeB.mtx");
    tc.out_csv.clear();
    tc.file_consistent = false;
    tc.file_delta = 0.2;
    auto s = axb::run_experiment(tc);
    CHECK(s.instance == "rectT-eyeB-inc");
    CHECK(s.rows[0].m == 3);
    CHECK(s.rows[0].p == 2);
    CHECK(s.rows[0].r2 == 4);
    REQUIRE(s.mean_phase_it.has_value());
    CHECK(s.it_display.find(" + ") != std::string::npos);
  }
}

TEST_CASE("stalled experiments report NaN mean and a capped display") {
  ExperimentConfig cfg;
  cfg.method = Method::ImeRgs;
  cfg.problem = small_spec();
  cfg.problem->q = 4;
  cfg.problem->rank_b = 2;  // rank-deficient B stalls IME-RGS
  cfg.trials = 2;
  cfg.tol = 1e-12;
  cfg.max_iters = 300;
  cfg.base_seed = 3;
  auto summary = axb::run_experiment(cfg);
  CHECK(summary.converged == 0);
  CHECK(summary.convergence_fraction == 0.0);
  CHECK(std::isnan(summary.mean_it));
  CHECK(summary.it_display == ">300");
  for (const auto& row : summary.rows) {
    CHECK(row.terminated == Termination::MaxIters);
    CHECK(row.iters == 300);
  }
}

TEST_CASE("experiment config validation") {
  auto expect_bad = [](ExperimentConfig cfg) {
    try {
      axb::run_experiment(cfg);
      FAIL_CHECK("expected BadSpec");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadSpec);
    }
  };

  ExperimentConfig cfg;
  cfg.problem = small_spec();
  cfg.trials = 0;
  expect_bad(cfg);

  cfg = ExperimentConfig{};
  expect_bad(cfg);  // neither spec nor files

  cfg = ExperimentConfig{};
  cfg.problem = small_spec();
  cfg.a_file = "a.mtx";
  cfg.b_file = "b.mtx";
  expect_bad(cfg);  // both sources

  cfg = ExperimentConfig{};
  cfg.a_file = "a.mtx";
  expect_bad(cfg);  // missing b_file

  cfg = ExperimentConfig{};
  cfg.a_file = "/nonexistent/a.mtx";
  cfg.b_file = "/nonexistent/b.mtx";
  try {
    axb::run_experiment(cfg);
    FAIL_CHECK("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("run_matrix classifies cells and keeps going after failures") {
  GridConfig grid;
  grid.trials = 2;
  grid.tol = 1e-6;
  grid.max_iters = 20000;
  grid.base_seed = 100;

  GridCell easy;
  easy.method = Method::CmeRk;
  easy.problem.m = 8;
  easy.problem.p = 3;
  easy.problem.q = 2;
  easy.problem.n = 6;
  easy.problem.rank_a = 3;
  easy.problem.rank_b = 2;
  easy.expect = "Y";
  easy.label = "easy";
  grid.cells.push_back(easy);

  GridCell wrong = easy;
  wrong.expect = "N";  // converges, so the expectation must fail
  wrong.label = "wrong";
  grid.cells.push_back(wrong);

  GridCell skipped = easy;
  skipped.expect = "-";
  skipped.label = "skipped";
  grid.cells.push_back(skipped);

  GridCell stall;
  stall.method = Method::ImeRgs;
  stall.problem = small_spec();
  stall.problem.q = 4;
  stall.problem.rank_b = 2;
  stall.expect = "N";
  stall.label = "stall";
  grid.cells.push_back(stall);

  std::ostringstream log;
  auto result = axb::run_matrix(grid, 2, &log);

  REQUIRE(result.cells.size() == 4);
  CHECK(result.cells[0].observed == "Y");
  CHECK(result.cells[0].pass);
  CHECK(result.cells[1].observed == "Y");
  CHECK(!result.cells[1].pass);
  CHECK(result.cells[2].observed == "-");
  CHECK(result.cells[2].pass);
  CHECK(result.cells[3].observed == "N");
  CHECK(result.cells[3].pass);
  CHECK(!result.all_pass);

  const std::string text = log.str();
  CHECK(text.find("[PASS] cme-rk easy") != std::string::npos);
  CHECK(text.find("[FAIL] cme-rk wrong") != std::string::npos);
  CHECK(text.find("[SKIP] cme-rk skipped") != std::string::npos);
  CHECK(text.find("[PASS] ime-rgs stall") != std::string::npos);

  // Three cells actually ran, two trials each; seed blocks include skips.
  REQUIRE(result.rows.size() == 6);
  CHECK(result.rows[0].seed == 100);
  CHECK(result.rows[1].seed == 101);
  CHECK(result.rows[2].seed == 102);
  CHECK(result.rows[3].seed == 103);
  CHECK(result.rows[4].seed == 106);
  CHECK(result.rows[5].seed == 107);
}

TEST_CASE("parse_grid_file") {
  TempDir dir;
  SUBCASE("full file with defaults and overrides") {
    write_file(dir.file("grid.json"), R"({
      "trials": 3,
      "base_seed": 17,
      "cells": [
        {"method": "cme-rk", "m": 8, "p": 3, "q": 2, "n": 6,
         "rank_a": 3, "rank_b": 2, "expect": "Y", "label": "cell-a"},
        {"method": "drek", "family": "type2", "m": 10, "p": 4, "q": 4,
         "n": 8, "rank_a": 3, "rank_b": 2, "cond_a": 5.0, "cond_b": 2.0,
         "consistent": false, "delta": 0.1, "expect": "-"}
      ]
    })");
    auto grid = axb::parse_grid_file(dir.file("grid.json"));
    CHECK(grid.trials == 3);
    CHECK(grid.tol == 1e-6);
    CHECK(grid.max_iters == 50000);
    CHECK(grid.base_seed == 17);
    REQUIRE(grid.cells.size() == 2);
    CHECK(grid.cells[0].method == Method::CmeRk);
    CHECK(grid.cells[0].label == "cell-a");
    CHECK(grid.cells[0].expect == "Y");
    CHECK(grid.cells[0].problem.rank_a == 3);
    CHECK(grid.cells[1].method == Method::Drek);
    CHECK(grid.cells[1].problem.family == axb::Family::TypeII);
    CHECK(grid.cells[1].problem.cond_a == 5.0);
    CHECK(!grid.cells[1].problem.consistent);
    REQUIRE(grid.cells[1].problem.noise_delta.has_value());
    CHECK(*grid.cells[1].problem.noise_delta == 0.1);
    CHECK(grid.cells[1].label == "type2-10x4r3-4x8r2-c5x2-inc-d0.1");
  }

  SUBCASE("rejects malformed grids") {
    auto expect_code = [&](const std::string& body, ErrorCode code) {
      write_file(dir.file("bad.json"), body);
      try {
        axb::parse_grid_file(dir.file("bad.json"));
        FAIL_CHECK("expected throw");
      } catch (const Error& e) {
        CHECK(e.code() == code);
      }
    };
    expect_code("{not json", ErrorCode::ParseError);
    expect_code(R"({"trials": 2})", ErrorCode::BadSpec);
    expect_code(R"({"cells": [{"m": 8}]})", ErrorCode::ParseError);
    expect_code(
        R"({"cells": [{"method": "nope", "m": 8, "p": 3, "q": 2, "n": 6,
            "rank_a": 3, "rank_b": 2}]})",
        ErrorCode::BadSpec);
    expect_code(
        R"({"cells": [{"method": "cme-rk", "m": 8, "p": 3, "q": 2, "n": 6,
            "rank_a": 3, "rank_b": 2, "expect": "X"}]})",
        ErrorCode::BadSpec);
    expect_code(
        R"({"trials": 0, "cells": [{"method": "cme-rk", "m": 8, "p": 3,
            "q": 2, "n": 6, "rank_a": 3, "rank_b": 2}]})",
        ErrorCode::BadSpec);
    expect_code(
        R"({"cells": [{"method": "cme-rk", "m": 8, "p": 3, "q": 2, "n": 6,
            "rank_a": 5, "rank_b": 2}]})",
        ErrorCode::BadSpec);
  }

  SUBCASE("missing file raises IoError") {
    try {
      axb::parse_grid_file(dir.file("absent.json"));
      FAIL_CHECK("expected IoError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IoError);
    }
  }
}

TEST_CASE("cli: single synthetic run") {
  auto res = run_cli(
      "--method cme-rk --m 8 --p 3 --q 2 --n 6 --trials 3 --tol 1e-8 "
      "--max-iters 30000 --seed 5");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("cme-rk") != std::string::npos);
  CHECK(res.output.find("conv 3/3") != std::string::npos);
}

TEST_CASE("cli: csv output is stable except wall time") {
  TempDir dir;
  const std::string f1 = dir.file("r1.csv");
  const std::string f2 = dir.file("r2.csv");
  const std::string base =
      "--method ime-rekrk --m 8 --p 3 --q 2 --n 6 --trials 2 --tol 1e-7 "
      "--max-iters 30000 --seed 21 --out-csv ";
  CHECK(run_cli(base + f1).exit_code == 0);
  CHECK(run_cli(base + f2).exit_code == 0);

  std::ifstream in1(f1), in2(f2);
  auto r1 = axb::parse_report_csv(in1);
  auto r2 = axb::parse_report_csv(in2);
  REQUIRE(r1.size() == 2);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].method == r2[i].method);
    CHECK(r1[i].instance == r2[i].instance);
    CHECK(r1[i].seed == r2[i].seed);
    CHECK(r1[i].iters == r2[i].iters);
    REQUIRE(r1[i].final_re.has_value());
    REQUIRE(r2[i].final_re.has_value());
    CHECK(*r1[i].final_re == *r2[i].final_re);
    CHECK(r1[i].terminated == r2[i].terminated);
  }
}

TEST_CASE("cli: trace output is valid ndjson") {
  TempDir dir;
  const std::string trace = dir.file("trace.ndjson");
  auto res = run_cli(
      "--method drek --m 8 --p 3 --q 2 --n 6 --trials 2 --tol 1e-10 "
      "--max-iters 30000 --seed 2 --trace-every 50 --out-trace " + trace);
  CHECK(res.exit_code == 0);
  std::ifstream in(trace);
  REQUIRE(in.good());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++lines;
  }
  CHECK(lines > 0);
}

TEST_CASE("cli: grid runs and exit codes") {
  TempDir dir;
  const std::string pass_grid = R"({
    "trials": 2, "max_iters": 20000, "base_seed": 4,
    "cells": [{"method": "cme-rk", "m": 8, "p": 3, "q": 2, "n": 6,
               "rank_a": 3, "rank_b": 2, "expect": "Y"}]
  })";
  write_file(dir.file("pass.json"), pass_grid);
  auto ok = run_cli("--grid " + dir.file("pass.json"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("[PASS]") != std::string::npos);

  const std::string fail_grid = R"({
    "trials": 2, "max_iters": 20000, "base_seed": 4,
    "cells": [{"method": "cme-rk", "m": 8, "p": 3, "q": 2, "n": 6,
               "rank_a": 3, "rank_b": 2, "expect": "N"}]
  })";
  write_file(dir.file("fail.json"), fail_grid);
  auto bad = run_cli("--grid " + dir.file("fail.json"));
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("[FAIL]") != std::string::npos);

  write_file(dir.file("empty.json"), R"({"cells": []})");
  CHECK(run_cli("--grid " + dir.file("empty.json")).exit_code == 0);
}

TEST_CASE("cli: usage and spec errors exit 2") {
  CHECK(run_cli("--method cme-rk --m 8 --p 3").exit_code == 2);
  CHECK(run_cli("--no-such-flag").exit_code == 2);
  CHECK(run_cli("--method bogus --m 8 --p 3 --q 2 --n 6").exit_code == 2);
  CHECK(run_cli("--grid /nonexistent/grid.json").exit_code == 2);
  CHECK(run_cli("--method cme-rk --m 8 --p 3 --q 2 --n 6 --rank-a 99")
            .exit_code == 2);
}
