#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "axb/solvers.hpp"

namespace axb {

// One CSV row: a single trial of a single experiment.
struct ReportRow {
  std::string method;
  std::string instance;
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t r1 = 0;
  std::size_t q = 0;
  std::size_t n = 0;
  std::size_t r2 = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t iters = 0;
  double wall_seconds = 0.0;
  std::optional<double> final_re;  // empty CSV field when absent
  Termination terminated = Termination::MaxIters;
};

inline constexpr const char* kReportCsvHeader =
    "method,instance,m,p,r1,q,n,r2,trial,seed,iters,wall_seconds,final_re,"
    "terminated";

// RFC-4180 output, floating point at 17 significant digits so a round trip
// through parse_report_csv is exact.
void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void write_report_csv(const std::vector<ReportRow>& rows,
                      const std::string& path);

std::vector<ReportRow> parse_report_csv(std::istream& in);

struct TraceRecord {
  std::string method;
  std::string instance;
  std::uint64_t trial = 0;
  std::uint64_t k = 0;
  double re = 0.0;
};

// NDJSON: one object per line, keys method/instance/trial/k/re. Each write()
// emits immediately, so arbitrarily long traces stream without buffering.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void write(const TraceRecord& rec);

 private:
  std::ostream& out_;
};

void write_trace_json(const std::vector<TraceRecord>& records,
                      std::ostream& out);

}  // namespace axb
