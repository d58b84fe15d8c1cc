#include "axb/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace axb {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool needs_quotes(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_field(const std::string& field) {
  if (!needs_quotes(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits a full CSV document into records of fields, honouring quoted fields
// (embedded commas, doubled quotes, embedded line breaks).
std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line_no = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    any = false;
  };

  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw Error(ErrorCode::ParseError,
                      "csv, line " + std::to_string(line_no) +
                          ": quote inside unquoted field");
        }
        quoted = true;
        any = true;
        break;
      case ',':
        end_field();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty() || !record.empty()) end_record();
        ++line_no;
        break;
      default:
        field += c;
        any = true;
        break;
    }
  }
  if (quoted) {
    throw Error(ErrorCode::ParseError,
                "csv, line " + std::to_string(line_no) +
                    ": unterminated quoted field");
  }
  if (any || !field.empty() || !record.empty()) end_record();
  return records;
}

std::uint64_t parse_u64(const std::string& tok, const char* what,
                        std::size_t rec) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw Error(ErrorCode::ParseError, "csv, record " + std::to_string(rec) +
                                           ": bad " + std::string(what) +
                                           " '" + tok + "'");
  }
  return v;
}

double parse_f64(const std::string& tok, const char* what, std::size_t rec) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw Error(ErrorCode::ParseError, "csv, record " + std::to_string(rec) +
                                           ": bad " + std::string(what) +
                                           " '" + tok + "'");
  }
  return v;
}

void json_string(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\r': out << "\\r"; break;
      case '\t': out << "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out << buf;
        } else {
          out << c;
        }
    }
  }
  out << '"';
}

}  // namespace

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << kReportCsvHeader << "\n";
  for (const ReportRow& r : rows) {
    out << csv_field(r.method) << ',' << csv_field(r.instance) << ',' << r.m
        << ',' << r.p << ',' << r.r1 << ',' << r.q << ',' << r.n << ','
        << r.r2 << ',' << r.trial << ',' << r.seed << ',' << r.iters << ','
        << fmt_double(r.wall_seconds) << ',';
    if (r.final_re) out << fmt_double(*r.final_re);
    out << ',' << termination_name(r.terminated) << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "csv: write failed");
}

void write_report_csv(const std::vector<ReportRow>& rows,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "csv: cannot open '" + path + "'");
  }
  write_report_csv(rows, out);
}

std::vector<ReportRow> parse_report_csv(std::istream& in) {
  const std::vector<std::vector<std::string>> records = read_csv(in);
  if (records.empty()) {
    throw Error(ErrorCode::ParseError, "csv: empty input");
  }
  {
    std::string header;
    for (std::size_t i = 0; i < records[0].size(); ++i) {
      if (i) header += ',';
      header += records[0][i];
    }
    if (header != kReportCsvHeader) {
      throw Error(ErrorCode::ParseError, "csv: unexpected header '" + header +
                                             "'");
    }
  }
  std::vector<ReportRow> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t rec = 1; rec < records.size(); ++rec) {
    const std::vector<std::string>& f = records[rec];
    if (f.size() != 14) {
      throw Error(ErrorCode::ParseError, "csv, record " + std::to_string(rec) +
                                             ": expected 14 fields, got " +
                                             std::to_string(f.size()));
    }
    ReportRow row;
    row.method = f[0];
    row.instance = f[1];
    row.m = parse_u64(f[2], "m", rec);
    row.p = parse_u64(f[3], "p", rec);
    row.r1 = parse_u64(f[4], "r1", rec);
    row.q = parse_u64(f[5], "q", rec);
    row.n = parse_u64(f[6], "n", rec);
    row.r2 = parse_u64(f[7], "r2", rec);
    row.trial = parse_u64(f[8], "trial", rec);
    row.seed = parse_u64(f[9], "seed", rec);
    row.iters = parse_u64(f[10], "iters", rec);
    row.wall_seconds = parse_f64(f[11], "wall_seconds", rec);
    if (!f[12].empty()) row.final_re = parse_f64(f[12], "final_re", rec);
    row.terminated = termination_from_name(f[13]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void TraceWriter::write(const TraceRecord& rec) {
  out_ << "{\"method\":";
  json_string(out_, rec.method);
  out_ << ",\"instance\":";
  json_string(out_, rec.instance);
  out_ << ",\"trial\":" << rec.trial << ",\"k\":" << rec.k
       << ",\"re\":" << fmt_double(rec.re) << "}\n";
  if (!out_) throw Error(ErrorCode::IoError, "trace: write failed");
}

void write_trace_json(const std::vector<TraceRecord>& records,
                      std::ostream& out) {
  TraceWriter writer(out);
  for (const TraceRecord& rec : records) writer.write(rec);
}

}  // namespace axb
