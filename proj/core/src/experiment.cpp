#include "axb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "axb/matrix_market.hpp"
#include "axb/oracle.hpp"

namespace axb {
namespace {

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string problem_label(const ProblemSpec& ps) {
  std::ostringstream os;
  os << (ps.family == Family::TypeI ? "type1" : "type2") << '-' << ps.m << 'x'
     << ps.p << 'r' << ps.rank_a << '-' << ps.q << 'x' << ps.n << 'r'
     << ps.rank_b;
  if (ps.family == Family::TypeII) os << "-c" << ps.cond_a << 'x' << ps.cond_b;
  os << (ps.consistent ? "-con" : "-inc");
  if (ps.noise_delta) os << "-d" << *ps.noise_delta;
  return os.str();
}

std::string file_label(const ExperimentConfig& cfg) {
  auto stem = [](const std::string& path) {
    return std::filesystem::path(path).stem().string();
  };
  std::string label = stem(cfg.a_file);
  if (cfg.transpose_a) label += 'T';
  label += '-' + stem(cfg.b_file);
  if (cfg.transpose_b) label += 'T';
  label += cfg.file_consistent ? "-con" : "-inc";
  return label;
}

struct TrialOutcome {
  ReportRow row;
  std::vector<TraceRecord> traces;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> phases;
  std::exception_ptr error;
};

std::size_t pick_threads(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested ? requested : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  return std::min(n, std::max<std::size_t>(jobs, 1));
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::CmeRk:
      return "cme-rk";
    case Method::ImeRgs:
      return "ime-rgs";
    case Method::ImeRekrk:
      return "ime-rekrk";
    case Method::ImeRekrgs:
      return "ime-rekrgs";
    case Method::Drek:
      return "drek";
    case Method::Dregs:
      return "dregs";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  static const std::pair<const char*, Method> table[] = {
      {"cme-rk", Method::CmeRk},         {"ime-rgs", Method::ImeRgs},
      {"ime-rekrk", Method::ImeRekrk},   {"ime-rekrgs", Method::ImeRekrgs},
      {"drek", Method::Drek},            {"dregs", Method::Dregs},
  };
  for (const auto& [spelling, method] : table) {
    if (name == spelling) return method;
  }
  throw Error(ErrorCode::BadSpec,
              "unknown method '" + name +
                  "' (expected cme-rk, ime-rgs, ime-rekrk, ime-rekrgs, drek, "
                  "or dregs)");
}

SolveReport run_method(Method method, const DenseMatrix& a,
                       const DenseMatrix& b, const DenseMatrix& c,
                       const SolveConfig& cfg, const StoppingRule& stop) {
  switch (method) {
    case Method::CmeRk:
      return solve_cme_rk(a, b, c, cfg, stop);
    case Method::ImeRgs:
      return solve_ime_rgs(a, b, c, cfg, stop);
    case Method::ImeRekrk:
      return solve_ime_rekrk(a, b, c, cfg, stop);
    case Method::ImeRekrgs:
      return solve_ime_rekrgs(a, b, c, cfg, stop);
    case Method::Drek:
      return solve_drek(a, b, c, cfg, stop);
    case Method::Dregs:
      return solve_dregs(a, b, c, cfg, stop);
  }
  throw Error(ErrorCode::BadSpec, "unknown method enumerator");
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials == 0) {
    throw Error(ErrorCode::BadSpec, "experiment: trials must be positive");
  }
  const bool synthetic = cfg.problem.has_value();
  if (synthetic && (!cfg.a_file.empty() || !cfg.b_file.empty())) {
    throw Error(ErrorCode::BadSpec,
                "experiment: give a problem spec or files, not both");
  }
  if (!synthetic && (cfg.a_file.empty() || cfg.b_file.empty())) {
    throw Error(ErrorCode::BadSpec,
                "experiment: need a problem spec or both A and B files");
  }

  DenseMatrix file_a;
  DenseMatrix file_b;
  std::size_t m = 0, p = 0, q = 0, n = 0, r1 = 0, r2 = 0;
  std::string label = cfg.instance_label;
  if (synthetic) {
    cfg.problem->validate();
    m = cfg.problem->m;
    p = cfg.problem->p;
    q = cfg.problem->q;
    n = cfg.problem->n;
    r1 = cfg.problem->rank_a;
    r2 = cfg.problem->rank_b;
    if (label.empty()) label = problem_label(*cfg.problem);
  } else {
    if (!cfg.file_consistent &&
        !(cfg.file_delta > 0.0 && cfg.file_delta < 1.0)) {
      throw Error(ErrorCode::BadSpec,
                  "experiment: inconsistent file instance needs delta in "
                  "(0, 1)");
    }
    file_a = load_matrix_market(cfg.a_file);
    file_b = load_matrix_market(cfg.b_file);
    if (cfg.transpose_a) file_a = transpose(file_a);
    if (cfg.transpose_b) file_b = transpose(file_b);
    m = file_a.rows();
    p = file_a.cols();
    q = file_b.rows();
    n = file_b.cols();
    r1 = numerical_rank(file_a);
    r2 = numerical_rank(file_b);
    if (label.empty()) label = file_label(cfg);
  }

  std::vector<TrialOutcome> outcomes(cfg.trials);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::uint64_t t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      TrialOutcome& out = outcomes[t];
      try {
        const std::uint64_t seed = cfg.base_seed + t;
        DenseMatrix own_a, own_b, c;
        const DenseMatrix* a = &file_a;
        const DenseMatrix* b = &file_b;
        if (synthetic) {
          ProblemSpec ps = *cfg.problem;
          ps.seed = seed;
          ProblemInstance inst = generate(ps);
          own_a = std::move(inst.a);
          own_b = std::move(inst.b);
          c = std::move(inst.c);
          a = &own_a;
          b = &own_b;
        } else {
          RandomSource rng(seed);
          c = make_rhs(file_a, file_b, cfg.file_consistent, cfg.file_delta,
                       rng)
                  .first;
        }
        const ReferenceSolution ref = reference_solution(*a, *b, c);

        SolveConfig sc;
        sc.max_iters = cfg.max_iters;
        sc.tol = cfg.tol;
        sc.trace_every = cfg.trace_every;
        sc.seed = seed;
        const SolveReport rep =
            run_method(cfg.method, *a, *b, c, sc, StoppingRule::oracle(ref));

        ReportRow& row = out.row;
        row.method = method_name(cfg.method);
        row.instance = label;
        row.m = m;
        row.p = p;
        row.r1 = r1;
        row.q = q;
        row.n = n;
        row.r2 = r2;
        row.trial = t;
        row.seed = seed;
        row.iters = rep.iterations;
        row.wall_seconds = rep.wall_seconds;
        row.final_re = rep.final_re;
        row.terminated = rep.terminated;
        out.phases = rep.phase_iterations;
        out.traces.reserve(rep.trace.size());
        for (const auto& [k, re] : rep.trace) {
          out.traces.push_back({row.method, label, t, k, re});
        }
      } catch (...) {
        out.error = std::current_exception();
      }
    }
  };

  const std::size_t nthreads = pick_threads(cfg.threads, cfg.trials);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const TrialOutcome& out : outcomes) {
    if (out.error) std::rethrow_exception(out.error);
  }

  ExperimentSummary s;
  s.method = method_name(cfg.method);
  s.instance = label;
  s.trials = cfg.trials;
  double wall_sum = 0.0;
  double it_sum = 0.0, p1_sum = 0.0, p2_sum = 0.0;
  std::uint64_t finished = 0;
  const bool two_phase =
      cfg.method == Method::Drek || cfg.method == Method::Dregs;
  for (TrialOutcome& out : outcomes) {
    wall_sum += out.row.wall_seconds;
    if (out.row.terminated == Termination::Converged) ++s.converged;
    if (out.row.terminated != Termination::MaxIters) {
      ++finished;
      it_sum += static_cast<double>(out.row.iters);
      if (out.phases) {
        p1_sum += static_cast<double>(out.phases->first);
        p2_sum += static_cast<double>(out.phases->second);
      }
    }
    s.rows.push_back(std::move(out.row));
    s.traces.insert(s.traces.end(),
                    std::make_move_iterator(out.traces.begin()),
                    std::make_move_iterator(out.traces.end()));
  }
  s.convergence_fraction =
      static_cast<double>(s.converged) / static_cast<double>(cfg.trials);
  s.mean_wall = wall_sum / static_cast<double>(cfg.trials);
  if (finished == 0) {
    s.mean_it = std::numeric_limits<double>::quiet_NaN();
    s.it_display = ">" + std::to_string(cfg.max_iters);
  } else {
    const double denom = static_cast<double>(finished);
    s.mean_it = it_sum / denom;
    if (two_phase) {
      s.mean_phase_it = {p1_sum / denom, p2_sum / denom};
      s.it_display = fmt1(s.mean_phase_it->first) + " + " +
                     fmt1(s.mean_phase_it->second);
    } else {
      s.it_display = fmt1(s.mean_it);
    }
  }

  if (!cfg.out_csv.empty()) write_report_csv(s.rows, cfg.out_csv);
  if (!cfg.out_trace.empty()) {
    std::ofstream out(cfg.out_trace);
    if (!out) {
      throw Error(ErrorCode::IoError,
                  "trace: cannot open '" + cfg.out_trace + "'");
    }
    write_trace_json(s.traces, out);
  }
  return s;
}

std::string format_summary(const ExperimentSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-10s  %-36s  IT %-19s  CPU %.4f  conv %llu/%llu",
                s.method.c_str(), s.instance.c_str(), s.it_display.c_str(),
                s.mean_wall, static_cast<unsigned long long>(s.converged),
                static_cast<unsigned long long>(s.trials));
  return buf;
}

GridConfig parse_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "grid: cannot open '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError,
                "grid: " + path + ": " + std::string(e.what()));
  }

  GridConfig cfg;
  try {
    cfg.trials = j.value("trials", std::uint64_t{20});
    cfg.tol = j.value("tol", 1e-6);
    cfg.max_iters = j.value("max_iters", std::uint64_t{50000});
    cfg.base_seed = j.value("base_seed", std::uint64_t{0});
    cfg.out_csv = j.value("out_csv", std::string{});
    if (!j.contains("cells") || !j["cells"].is_array()) {
      throw Error(ErrorCode::BadSpec, "grid: missing 'cells' array");
    }
    for (const nlohmann::json& jc : j["cells"]) {
      GridCell cell;
      cell.method = method_from_name(jc.at("method").get<std::string>());
      ProblemSpec& ps = cell.problem;
      const std::string fam = jc.value("family", std::string("type1"));
      if (fam == "type1") {
        ps.family = Family::TypeI;
      } else if (fam == "type2") {
        ps.family = Family::TypeII;
      } else {
        throw Error(ErrorCode::BadSpec, "grid: unknown family '" + fam + "'");
      }
      ps.m = jc.at("m").get<std::size_t>();
      ps.p = jc.at("p").get<std::size_t>();
      ps.q = jc.at("q").get<std::size_t>();
      ps.n = jc.at("n").get<std::size_t>();
      ps.rank_a = jc.at("rank_a").get<std::size_t>();
      ps.rank_b = jc.at("rank_b").get<std::size_t>();
      ps.cond_a = jc.value("cond_a", 1.0);
      ps.cond_b = jc.value("cond_b", 1.0);
      ps.consistent = jc.value("consistent", true);
      if (jc.contains("delta")) ps.noise_delta = jc["delta"].get<double>();
      cell.expect = jc.value("expect", std::string("-"));
      if (cell.expect != "Y" && cell.expect != "N" && cell.expect != "-") {
        throw Error(ErrorCode::BadSpec,
                    "grid: expect must be Y, N, or -, got '" + cell.expect +
                        "'");
      }
      cell.label = jc.value("label", std::string{});
      if (cell.label.empty()) cell.label = problem_label(ps);
      ps.validate();
      cfg.cells.push_back(std::move(cell));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError,
                "grid: " + path + ": " + std::string(e.what()));
  }
  if (cfg.trials == 0) {
    throw Error(ErrorCode::BadSpec, "grid: trials must be positive");
  }
  return cfg;
}

GridRunResult run_matrix(const GridConfig& cfg, std::size_t threads,
                         std::ostream* log) {
  GridRunResult result;
  for (std::size_t idx = 0; idx < cfg.cells.size(); ++idx) {
    const GridCell& cell = cfg.cells[idx];
    GridCellResult r;
    r.cell = cell;
    const std::string tag =
        std::string(method_name(cell.method)) + " " + cell.label;
    if (cell.expect == "-") {
      r.observed = "-";
      if (log) *log << "[SKIP] " << tag << "\n";
      result.cells.push_back(std::move(r));
      continue;
    }

    ExperimentConfig ec;
    ec.method = cell.method;
    ec.problem = cell.problem;
    ec.instance_label = cell.label;
    ec.trials = cfg.trials;
    ec.tol = cfg.tol;
    ec.max_iters = cfg.max_iters;
    // Distinct seed block per cell so every trial in the grid is independent.
    ec.base_seed = cfg.base_seed + idx * cfg.trials;
    ec.threads = threads;

    try {
      ExperimentSummary s = run_experiment(ec);
      r.converged = s.converged;
      r.mean_it = s.mean_it;
      for (const ReportRow& row : s.rows) {
        if (row.terminated == Termination::MaxIters && row.final_re &&
            *row.final_re > 1e-2) {
          ++r.failed_high_re;
        }
      }
      if (r.converged * 10 >= cfg.trials * 9) {
        r.observed = "Y";
      } else if (r.failed_high_re * 10 >= cfg.trials * 9) {
        r.observed = "N";
      } else {
        r.observed = "?";
      }
      r.pass = r.observed == cell.expect;
      if (log) {
        *log << (r.pass ? "[PASS] " : "[FAIL] ") << tag << "  expect="
             << cell.expect << " observed=" << r.observed << "  conv "
             << r.converged << "/" << cfg.trials << "  IT " << s.it_display
             << "\n";
      }
      result.rows.insert(result.rows.end(),
                         std::make_move_iterator(s.rows.begin()),
                         std::make_move_iterator(s.rows.end()));
    } catch (const Error& e) {
      r.observed = "!";
      r.pass = false;
      if (log) {
        *log << "[FAIL] " << tag << "  error: " << e.what() << "\n";
      }
    }
    result.all_pass = result.all_pass && r.pass;
    result.cells.push_back(std::move(r));
  }
  if (!cfg.out_csv.empty()) write_report_csv(result.rows, cfg.out_csv);
  return result;
}

}  // namespace axb
