#include "axb/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace axb {
namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::ParseError,
              "matrix market, line " + std::to_string(line_no) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) tokens.push_back(tok);
  return tokens;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool parse_index(const std::string& tok, std::size_t& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || v < 0) return false;
  out = static_cast<std::size_t>(v);
  return true;
}

bool parse_value(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

bool skippable(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;  // blank
}

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  bool next_raw(std::string& out) {
    if (!std::getline(in, out)) return false;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    ++line_no;
    return true;
  }

  // Next line that is neither blank nor a comment.
  bool next(std::string& out) {
    while (next_raw(out)) {
      if (!skippable(out)) return true;
    }
    return false;
  }
};

void set_entry(DenseMatrix& out, std::vector<std::uint8_t>& seen,
               std::size_t i, std::size_t j, double value,
               std::size_t line_no) {
  const std::size_t idx = i * out.cols() + j;
  if (seen[idx]) {
    throw Error(ErrorCode::DuplicateEntry,
                "matrix market, line " + std::to_string(line_no) +
                    ": duplicate entry (" + std::to_string(i + 1) + ", " +
                    std::to_string(j + 1) + ")");
  }
  seen[idx] = 1;
  out(i, j) = value;
}

}  // namespace

MatrixMarketHeader parse_matrix_market_banner(const std::string& line) {
  std::vector<std::string> tok = split_ws(line);
  if (tok.size() != 5 || tok[0] != "%%MatrixMarket") {
    throw Error(ErrorCode::ParseError,
                "matrix market, line 1: bad banner, expected "
                "'%%MatrixMarket matrix <format> <field> <symmetry>'");
  }
  if (lower(tok[1]) != "matrix") {
    throw Error(ErrorCode::ParseError,
                "matrix market, line 1: unsupported object '" + tok[1] + "'");
  }
  MatrixMarketHeader h;
  const std::string fmt = lower(tok[2]);
  if (fmt == "coordinate") {
    h.format = MmFormat::Coordinate;
  } else if (fmt == "array") {
    h.format = MmFormat::Array;
  } else {
    throw Error(ErrorCode::ParseError,
                "matrix market, line 1: unsupported format '" + tok[2] + "'");
  }
  const std::string field = lower(tok[3]);
  if (field == "real") {
    h.field = MmField::Real;
  } else if (field == "integer") {
    h.field = MmField::Integer;
  } else if (field == "pattern") {
    h.field = MmField::Pattern;
  } else {
    throw Error(ErrorCode::ParseError,
                "matrix market, line 1: unsupported field '" + tok[3] + "'");
  }
  const std::string sym = lower(tok[4]);
  if (sym == "general") {
    h.symmetry = MmSymmetry::General;
  } else if (sym == "symmetric") {
    h.symmetry = MmSymmetry::Symmetric;
  } else {
    throw Error(ErrorCode::ParseError,
                "matrix market, line 1: unsupported symmetry '" + tok[4] +
                    "'");
  }
  if (h.format == MmFormat::Array && h.field == MmField::Pattern) {
    throw Error(ErrorCode::ParseError,
                "matrix market, line 1: pattern field requires coordinate "
                "format");
  }
  return h;
}

DenseMatrix parse_matrix_market(std::istream& in) {
  LineReader reader{in};
  std::string line;
  if (!reader.next_raw(line)) {
    throw Error(ErrorCode::ParseError, "matrix market, line 1: empty input");
  }
  const MatrixMarketHeader header = parse_matrix_market_banner(line);

  if (!reader.next(line)) parse_fail(reader.line_no + 1, "missing size line");
  std::vector<std::string> size_tok = split_ws(line);
  const std::size_t want_sizes =
      header.format == MmFormat::Coordinate ? 3 : 2;
  if (size_tok.size() != want_sizes) {
    parse_fail(reader.line_no, "size line needs " +
                                   std::to_string(want_sizes) + " fields");
  }
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!parse_index(size_tok[0], rows) || !parse_index(size_tok[1], cols)) {
    parse_fail(reader.line_no, "bad dimensions '" + line + "'");
  }
  if (header.format == MmFormat::Coordinate &&
      !parse_index(size_tok[2], nnz)) {
    parse_fail(reader.line_no, "bad nonzero count '" + size_tok[2] + "'");
  }
  if (header.symmetry == MmSymmetry::Symmetric && rows != cols) {
    parse_fail(reader.line_no, "symmetric matrix must be square");
  }
  if (static_cast<double>(rows) * static_cast<double>(cols) > 5e7) {
    throw Error(ErrorCode::TooLarge,
                "matrix market: refusing to densify " + std::to_string(rows) +
                    "x" + std::to_string(cols));
  }

  DenseMatrix out(rows, cols);
  std::vector<std::uint8_t> seen(rows * cols, 0);

  if (header.format == MmFormat::Coordinate) {
    const std::size_t value_tokens = header.field == MmField::Pattern ? 2 : 3;
    for (std::size_t e = 0; e < nnz; ++e) {
      if (!reader.next(line)) {
        parse_fail(reader.line_no + 1,
                   "expected " + std::to_string(nnz) + " entries, got " +
                       std::to_string(e));
      }
      std::vector<std::string> tok = split_ws(line);
      if (tok.size() != value_tokens) {
        parse_fail(reader.line_no,
                   "entry needs " + std::to_string(value_tokens) + " fields");
      }
      std::size_t i = 0, j = 0;
      if (!parse_index(tok[0], i) || !parse_index(tok[1], j)) {
        parse_fail(reader.line_no, "bad coordinate '" + line + "'");
      }
      if (i < 1 || j < 1 || i > rows || j > cols) {
        throw Error(ErrorCode::DimensionError,
                    "matrix market, line " + std::to_string(reader.line_no) +
                        ": index (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") outside " +
                        std::to_string(rows) + "x" + std::to_string(cols));
      }
      double value = 1.0;
      if (header.field != MmField::Pattern &&
          !parse_value(tok[2], value)) {
        parse_fail(reader.line_no, "bad value '" + tok[2] + "'");
      }
      set_entry(out, seen, i - 1, j - 1, value, reader.line_no);
      if (header.symmetry == MmSymmetry::Symmetric && i != j) {
        set_entry(out, seen, j - 1, i - 1, value, reader.line_no);
      }
    }
  } else {
    const std::size_t total = header.symmetry == MmSymmetry::Symmetric
                                  ? rows * (rows + 1) / 2
                                  : rows * cols;
    // Array data is column-major; symmetric files store the lower triangle.
    std::size_t i = 0, j = 0;
    for (std::size_t e = 0; e < total; ++e) {
      if (!reader.next(line)) {
        parse_fail(reader.line_no + 1,
                   "expected " + std::to_string(total) + " values, got " +
                       std::to_string(e));
      }
      std::vector<std::string> tok = split_ws(line);
      double value = 0.0;
      if (tok.size() != 1 || !parse_value(tok[0], value)) {
        parse_fail(reader.line_no, "expected one value per line");
      }
      out(i, j) = value;
      if (header.symmetry == MmSymmetry::Symmetric && i != j) out(j, i) = value;
      ++i;
      if (header.symmetry == MmSymmetry::Symmetric) {
        if (i == rows) i = ++j;
      } else if (i == rows) {
        i = 0;
        ++j;
      }
    }
  }

  while (reader.next(line)) {
    parse_fail(reader.line_no, "unexpected trailing data '" + line + "'");
  }
  return out;
}

DenseMatrix parse_matrix_market(const std::string& text) {
  std::istringstream iss(text);
  return parse_matrix_market(iss);
}

DenseMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError,
                "matrix market: cannot open '" + path + "'");
  }
  return parse_matrix_market(in);
}

}  // namespace axb
