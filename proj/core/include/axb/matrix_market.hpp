#pragma once

#include <istream>
#include <string>

#include "axb/matrix.hpp"

namespace axb {

enum class MmFormat { Coordinate, Array };
enum class MmField { Real, Integer, Pattern };
enum class MmSymmetry { General, Symmetric };

struct MatrixMarketHeader {
  MmFormat format = MmFormat::Coordinate;
  MmField field = MmField::Real;
  MmSymmetry symmetry = MmSymmetry::General;
};

// Banner line only ("%%MatrixMarket matrix <format> <field> <symmetry>").
// Throws ParseError on anything else.
MatrixMarketHeader parse_matrix_market_banner(const std::string& line);

// Parses a Matrix Market stream into a dense matrix. Coordinate and array
// formats; real/integer/pattern fields; general or symmetric symmetry.
// Pattern entries densify to 1.0, symmetric entries are mirrored, indices are
// 1-based in the file. Errors: ParseError (with line number), DimensionError
// (index outside the declared shape), DuplicateEntry (repeated coordinate).
DenseMatrix parse_matrix_market(std::istream& in);
DenseMatrix parse_matrix_market(const std::string& text);

// Opens and parses a file; IoError when the file cannot be read.
DenseMatrix load_matrix_market(const std::string& path);

}  // namespace axb
