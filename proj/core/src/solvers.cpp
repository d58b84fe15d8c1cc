#include "axb/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <deque>
#include <string>

namespace axb {
namespace {

inline double dot(const double* u, const double* v, std::size_t len) {
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) sum += u[i] * v[i];
  return sum;
}

inline void axpy(double* y, double a, const double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += a * x[i];
}

inline void add_flops(FlopCount* fc, std::uint64_t n) {
  if (fc) fc->flops += n;
}

// Kaczmarz row projection on Y (rows x len, row-major): with the residual
// row r = (rhs - z - arow * Y) / norm, applies Y_k += arow[k] * r, and the
// same increment to E when given. Zero entries of arow are skipped, which
// only changes the work (not the result) and makes sparse rows cheap.
void row_step_core(double* y, std::size_t rows, std::size_t len,
                   const double* arow, const double* rhs, const double* z_row,
                   double inv_norm, double* scratch, double* e,
                   FlopCount* fc) {
  if (z_row) {
    for (std::size_t c = 0; c < len; ++c) scratch[c] = rhs[c] - z_row[c];
    add_flops(fc, len);
  } else {
    std::memcpy(scratch, rhs, len * sizeof(double));
  }
  for (std::size_t k = 0; k < rows; ++k) {
    const double ak = arow[k];
    if (ak == 0.0) continue;
    axpy(scratch, -ak, y + k * len, len);
    add_flops(fc, 2 * len);
  }
  for (std::size_t c = 0; c < len; ++c) scratch[c] *= inv_norm;
  add_flops(fc, len);
  for (std::size_t k = 0; k < rows; ++k) {
    const double ak = arow[k];
    if (ak == 0.0) continue;
    axpy(y + k * len, ak, scratch, len);
    add_flops(fc, 2 * len);
    if (e) {
      axpy(e + k * len, ak, scratch, len);
      add_flops(fc, 2 * len);
    }
  }
}

// Kaczmarz column update on X (rows x len, row-major): per row r,
// d = (ycol[r] - w_row[r] - X_r . bcol) / norm; X_r += d * bcol.
void col_step_core(double* x, std::size_t rows, std::size_t len,
                   const double* bcol, const double* ycol,
                   std::size_t y_stride, const double* w_row, double inv_norm,
                   FlopCount* fc) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* xr = x + r * len;
    double d = ycol[r * y_stride] - dot(xr, bcol, len);
    if (w_row) d -= w_row[r];
    d *= inv_norm;
    axpy(xr, d, bcol, len);
  }
  add_flops(fc, static_cast<std::uint64_t>(rows) * (4 * len + 2) +
                    (w_row ? rows : 0));
}

// Z <- (I - v v^T / ||v||^2) Z for Z (rows x len, row-major), v length rows.
void project_out_core(double* z, std::size_t rows, std::size_t len,
                      const double* v, double inv_norm, double* scratch,
                      FlopCount* fc) {
  std::memset(scratch, 0, len * sizeof(double));
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    axpy(scratch, vi, z + i * len, len);
    add_flops(fc, 2 * len);
  }
  for (std::size_t c = 0; c < len; ++c) scratch[c] *= inv_norm;
  add_flops(fc, len);
  for (std::size_t i = 0; i < rows; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    axpy(z + i * len, -vi, scratch, len);
    add_flops(fc, 2 * len);
  }
}

// Gauss-Seidel column sweep: w = acol^T R / norm; Y_{j,:} += w; R -= acol w.
void gs_col_step_core(double* y_row_j, double* r, std::size_t a_rows,
                      std::size_t len, const double* acol, double inv_norm,
                      double* w, FlopCount* fc) {
  std::memset(w, 0, len * sizeof(double));
  for (std::size_t i = 0; i < a_rows; ++i) {
    const double ai = acol[i];
    if (ai == 0.0) continue;
    axpy(w, ai, r + i * len, len);
    add_flops(fc, 2 * len);
  }
  for (std::size_t c = 0; c < len; ++c) w[c] *= inv_norm;
  add_flops(fc, len);
  axpy(y_row_j, 1.0, w, len);
  add_flops(fc, len);
  for (std::size_t i = 0; i < a_rows; ++i) {
    const double ai = acol[i];
    if (ai == 0.0) continue;
    axpy(r + i * len, -ai, w, len);
    add_flops(fc, 2 * len);
  }
}

// Gauss-Seidel row sweep: u_r = E_r . brow / norm; X(r, col) += u_r;
// E_r -= u_r * brow.
void gs_row_step_core(double* x, std::size_t x_cols, std::size_t rows,
                      std::size_t len, const double* brow, std::size_t col,
                      double inv_norm, double* e, FlopCount* fc) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* er = e + r * len;
    const double u = dot(er, brow, len) * inv_norm;
    x[r * x_cols + col] += u;
    axpy(er, -u, brow, len);
  }
  add_flops(fc, static_cast<std::uint64_t>(rows) * (4 * len + 2));
}

// Y <- Y - arow^T arow (Y - F) / norm.
void y_pull_step_core(double* y, const double* f, std::size_t rows,
                      std::size_t len, const double* arow, double inv_norm,
                      double* scratch, FlopCount* fc) {
  std::memset(scratch, 0, len * sizeof(double));
  for (std::size_t k = 0; k < rows; ++k) {
    const double ak = arow[k];
    if (ak == 0.0) continue;
    const double* yk = y + k * len;
    const double* fk = f + k * len;
    for (std::size_t c = 0; c < len; ++c) scratch[c] += ak * (yk[c] - fk[c]);
    add_flops(fc, 3 * len);
  }
  for (std::size_t c = 0; c < len; ++c) scratch[c] *= inv_norm;
  add_flops(fc, len);
  for (std::size_t k = 0; k < rows; ++k) {
    const double ak = arow[k];
    if (ak == 0.0) continue;
    axpy(y + k * len, -ak, scratch, len);
    add_flops(fc, 2 * len);
  }
}

// X <- X - (X - U) bcol bcol^T / norm.
void x_pull_step_core(double* x, const double* u, std::size_t rows,
                      std::size_t len, const double* bcol, double inv_norm,
                      FlopCount* fc) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* xr = x + r * len;
    const double* ur = u + r * len;
    double d = 0.0;
    for (std::size_t t = 0; t < len; ++t) d += (xr[t] - ur[t]) * bcol[t];
    d *= inv_norm;
    axpy(xr, -d, bcol, len);
  }
  add_flops(fc, static_cast<std::uint64_t>(rows) * (5 * len + 1));
}

std::vector<double> column_major_copy(const DenseMatrix& m) {
  std::vector<double> cols(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) cols[j * m.rows() + i] = row[j];
  }
  return cols;
}

std::vector<double> strided_column(const DenseMatrix& m, std::size_t j) {
  std::vector<double> col(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) col[i] = m(i, j);
  return col;
}

void check_index(std::size_t idx, std::size_t bound, const char* what) {
  if (idx >= bound) {
    throw Error(ErrorCode::BadShape,
                std::string(what) + ": index " + std::to_string(idx) +
                    " out of range " + std::to_string(bound));
  }
}

double row_norm_sq_of(const DenseMatrix& m, std::size_t i) {
  return dot(m.row(i), m.row(i), m.cols());
}

double col_norm_sq_of(const DenseMatrix& m, std::size_t j) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) sum += m(i, j) * m(i, j);
  return sum;
}

SamplingWeights weights_or(const DenseMatrix& m, Axis axis, ErrorCode code,
                           const char* what) {
  try {
    return build_weights(axis_norms_sq(m, axis));
  } catch (const Error&) {
    throw Error(code, std::string(what) + ": zero " +
                          (axis == Axis::Row ? "row" : "column"));
  }
}

void check_shapes(const DenseMatrix& a, const DenseMatrix& b,
                  const DenseMatrix& c, const char* what) {
  if (a.empty() || b.empty() || c.empty()) {
    throw Error(ErrorCode::BadShape, std::string(what) + ": empty matrix");
  }
  if (a.rows() != c.rows() || b.cols() != c.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + ": A, B, C shapes not conformable");
  }
}

}  // namespace

// --- public kernels ---

void rk_row_step(DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& c,
                 std::size_t i, double row_norm_sq, FlopCount* fc) {
  check_index(i, a.rows(), "rk_row_step");
  if (a.cols() != y.rows() || c.cols() != y.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "rk_row_step: shape mismatch");
  }
  std::vector<double> scratch(y.cols());
  row_step_core(y.data().data(), y.rows(), y.cols(), a.row(i), c.row(i),
                nullptr, 1.0 / row_norm_sq, scratch.data(), nullptr, fc);
}

void rk_row_step(DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& c,
                 std::size_t i) {
  check_index(i, a.rows(), "rk_row_step");
  const double norm_sq = row_norm_sq_of(a, i);
  if (!(norm_sq > 0.0)) {
    throw Error(ErrorCode::ZeroRow, "rk_row_step: zero row " +
                                        std::to_string(i) + " of A");
  }
  rk_row_step(y, a, c, i, norm_sq, nullptr);
}

void rk_col_step(DenseMatrix& x, const DenseMatrix& b, const double* y_col,
                 std::size_t y_stride, std::size_t j, double col_norm_sq,
                 FlopCount* fc) {
  check_index(j, b.cols(), "rk_col_step");
  if (x.cols() != b.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "rk_col_step: shape mismatch");
  }
  std::vector<double> bcol = strided_column(b, j);
  col_step_core(x.data().data(), x.rows(), x.cols(), bcol.data(), y_col,
                y_stride, nullptr, 1.0 / col_norm_sq, fc);
}

void rk_col_step(DenseMatrix& x, const DenseMatrix& b,
                 const std::vector<double>& y_col, std::size_t j) {
  check_index(j, b.cols(), "rk_col_step");
  if (y_col.size() != x.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "rk_col_step: y_col length");
  }
  const double norm_sq = col_norm_sq_of(b, j);
  if (!(norm_sq > 0.0)) {
    throw Error(ErrorCode::ZeroColumn, "rk_col_step: zero column " +
                                           std::to_string(j) + " of B");
  }
  rk_col_step(x, b, y_col.data(), 1, j, norm_sq, nullptr);
}

void rgs_col_step(DenseMatrix& y, DenseMatrix& r, const DenseMatrix& a,
                  std::size_t j, double col_norm_sq, double* w_out,
                  FlopCount* fc) {
  check_index(j, a.cols(), "rgs_col_step");
  if (a.rows() != r.rows() || y.cols() != r.cols() || y.rows() != a.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "rgs_col_step: shape mismatch");
  }
  std::vector<double> acol = strided_column(a, j);
  gs_col_step_core(y.row(j), r.data().data(), a.rows(), r.cols(), acol.data(),
                   1.0 / col_norm_sq, w_out, fc);
}

void rgs_col_step(DenseMatrix& y, DenseMatrix& r, const DenseMatrix& a,
                  std::size_t j, std::vector<double>* w_out) {
  check_index(j, a.cols(), "rgs_col_step");
  const double norm_sq = col_norm_sq_of(a, j);
  if (!(norm_sq > 0.0)) {
    throw Error(ErrorCode::ZeroColumn, "rgs_col_step: zero column " +
                                           std::to_string(j) + " of A");
  }
  std::vector<double> w(r.cols());
  rgs_col_step(y, r, a, j, norm_sq, w.data(), nullptr);
  if (w_out) *w_out = std::move(w);
}

void rgs_row_step(DenseMatrix& x, DenseMatrix& e, const DenseMatrix& b,
                  std::size_t i, double row_norm_sq, FlopCount* fc) {
  check_index(i, b.rows(), "rgs_row_step");
  if (e.cols() != b.cols() || x.rows() != e.rows() || x.cols() != b.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "rgs_row_step: shape mismatch");
  }
  gs_row_step_core(x.data().data(), x.cols(), e.rows(), e.cols(), b.row(i), i,
                   1.0 / row_norm_sq, e.data().data(), fc);
}

void rgs_row_step(DenseMatrix& x, DenseMatrix& e, const DenseMatrix& b,
                  std::size_t i) {
  check_index(i, b.rows(), "rgs_row_step");
  const double norm_sq = row_norm_sq_of(b, i);
  if (!(norm_sq > 0.0)) {
    throw Error(ErrorCode::ZeroRow, "rgs_row_step: zero row " +
                                        std::to_string(i) + " of B");
  }
  rgs_row_step(x, e, b, i, norm_sq, nullptr);
}

void rek_z_step(DenseMatrix& z, const DenseMatrix& a, std::size_t j,
                double col_norm_sq, FlopCount* fc) {
  check_index(j, a.cols(), "rek_z_step");
  if (z.rows() != a.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "rek_z_step: shape mismatch");
  }
  std::vector<double> acol = strided_column(a, j);
  std::vector<double> scratch(z.cols());
  project_out_core(z.data().data(), z.rows(), z.cols(), acol.data(),
                   1.0 / col_norm_sq, scratch.data(), fc);
}

void rek_z_step(DenseMatrix& z, const DenseMatrix& a, std::size_t j) {
  check_index(j, a.cols(), "rek_z_step");
  const double norm_sq = col_norm_sq_of(a, j);
  if (!(norm_sq > 0.0)) {
    throw Error(ErrorCode::ZeroColumn, "rek_z_step: zero column " +
                                           std::to_string(j) + " of A");
  }
  rek_z_step(z, a, j, norm_sq, nullptr);
}

void rek_y_step(DenseMatrix& y, const DenseMatrix& a, const DenseMatrix& c,
                const DenseMatrix& z, std::size_t i, double row_norm_sq,
                DenseMatrix* e, FlopCount* fc) {
  check_index(i, a.rows(), "rek_y_step");
  if (a.cols() != y.rows() || c.cols() != y.cols() || !z.same_shape(c)) {
    throw Error(ErrorCode::ShapeMismatch, "rek_y_step: shape mismatch");
  }
  if (!(row_norm_sq > 0.0)) {
    throw Error(ErrorCode::ZeroRow, "rek_y_step: zero row " +
                                        std::to_string(i) + " of A");
  }
  std::vector<double> scratch(y.cols());
  row_step_core(y.data().data(), y.rows(), y.cols(), a.row(i), c.row(i),
                z.row(i), 1.0 / row_norm_sq, scratch.data(),
                e ? e->data().data() : nullptr, fc);
}

// --- iteration state ---

CmeRkIteration::CmeRkIteration(const DenseMatrix& a, const DenseMatrix& b,
                               const DenseMatrix& c)
    : a_(a),
      b_(b),
      c_(c),
      rows_a_(weights_or(a, Axis::Row, ErrorCode::ZeroRow, "solve_cme_rk A")),
      cols_b_(weights_or(b, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_cme_rk B")),
      bcols_(column_major_copy(b)),
      y_(a.cols(), c.cols()),
      x_(a.cols(), b.rows()),
      scratch_(c.cols()) {
  check_shapes(a, b, c, "solve_cme_rk");
}

void CmeRkIteration::step(RandomSource& rng) {
  const std::size_t i = sample_index(rows_a_, rng);
  const std::size_t j = sample_index(cols_b_, rng);
  row_step_core(y_.data().data(), y_.rows(), y_.cols(), a_.row(i), c_.row(i),
                nullptr, 1.0 / rows_a_.weights[i], scratch_.data(), nullptr,
                &fc_);
  col_step_core(x_.data().data(), x_.rows(), x_.cols(),
                bcols_.data() + j * b_.rows(), y_.data().data() + j,
                y_.cols(), nullptr, 1.0 / cols_b_.weights[j], &fc_);
}

ImeRgsIteration::ImeRgsIteration(const DenseMatrix& a, const DenseMatrix& b,
                                 const DenseMatrix& c)
    : a_(a),
      b_(b),
      c_(c),
      cols_a_(weights_or(a, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_ime_rgs A")),
      rows_b_(weights_or(b, Axis::Row, ErrorCode::ZeroRow, "solve_ime_rgs B")),
      acols_(column_major_copy(a)),
      y_(a.cols(), c.cols()),
      r_(c.rows(), c.cols(), c.data()),
      e_(a.cols(), c.cols()),
      x_(a.cols(), b.rows()),
      w_buf_(c.cols()) {
  check_shapes(a, b, c, "solve_ime_rgs");
}

void ImeRgsIteration::step(RandomSource& rng) {
  const std::size_t j = sample_index(cols_a_, rng);
  const std::size_t i = sample_index(rows_b_, rng);
  gs_col_step_core(y_.row(j), r_.data().data(), a_.rows(), r_.cols(),
                   acols_.data() + j * a_.rows(), 1.0 / cols_a_.weights[j],
                   w_buf_.data(), &fc_);
  axpy(e_.row(j), 1.0, w_buf_.data(), e_.cols());
  add_flops(&fc_, e_.cols());
  gs_row_step_core(x_.data().data(), x_.cols(), e_.rows(), e_.cols(),
                   b_.row(i), i, 1.0 / rows_b_.weights[i], e_.data().data(),
                   &fc_);
}

ImeRekrkIteration::ImeRekrkIteration(const DenseMatrix& a,
                                     const DenseMatrix& b,
                                     const DenseMatrix& c)
    : a_(a),
      b_(b),
      c_(c),
      rows_a_(weights_or(a, Axis::Row, ErrorCode::ZeroRow,
                         "solve_ime_rekrk A")),
      cols_a_(weights_or(a, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_ime_rekrk A")),
      cols_b_(weights_or(b, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_ime_rekrk B")),
      acols_(column_major_copy(a)),
      bcols_(column_major_copy(b)),
      z_(c.rows(), c.cols(), c.data()),
      y_(a.cols(), c.cols()),
      x_(a.cols(), b.rows()),
      scratch_(c.cols()) {
  check_shapes(a, b, c, "solve_ime_rekrk");
}

void ImeRekrkIteration::step(RandomSource& rng) {
  const std::size_t i = sample_index(rows_a_, rng);
  const std::size_t j = sample_index(cols_a_, rng);
  const std::size_t l = sample_index(cols_b_, rng);
  project_out_core(z_.data().data(), z_.rows(), z_.cols(),
                   acols_.data() + j * a_.rows(), 1.0 / cols_a_.weights[j],
                   scratch_.data(), &fc_);
  row_step_core(y_.data().data(), y_.rows(), y_.cols(), a_.row(i), c_.row(i),
                z_.row(i), 1.0 / rows_a_.weights[i], scratch_.data(), nullptr,
                &fc_);
  col_step_core(x_.data().data(), x_.rows(), x_.cols(),
                bcols_.data() + l * b_.rows(), y_.data().data() + l,
                y_.cols(), nullptr, 1.0 / cols_b_.weights[l], &fc_);
}

ImeRekrgsIteration::ImeRekrgsIteration(const DenseMatrix& a,
                                       const DenseMatrix& b,
                                       const DenseMatrix& c)
    : a_(a),
      b_(b),
      c_(c),
      rows_a_(weights_or(a, Axis::Row, ErrorCode::ZeroRow,
                         "solve_ime_rekrgs A")),
      cols_a_(weights_or(a, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_ime_rekrgs A")),
      rows_b_(weights_or(b, Axis::Row, ErrorCode::ZeroRow,
                         "solve_ime_rekrgs B")),
      acols_(column_major_copy(a)),
      z_(c.rows(), c.cols(), c.data()),
      y_(a.cols(), c.cols()),
      e_(a.cols(), c.cols()),
      x_(a.cols(), b.rows()),
      scratch_(c.cols()) {
  check_shapes(a, b, c, "solve_ime_rekrgs");
}

void ImeRekrgsIteration::step(RandomSource& rng) {
  const std::size_t i = sample_index(rows_a_, rng);
  const std::size_t j = sample_index(cols_a_, rng);
  const std::size_t l = sample_index(rows_b_, rng);
  project_out_core(z_.data().data(), z_.rows(), z_.cols(),
                   acols_.data() + j * a_.rows(), 1.0 / cols_a_.weights[j],
                   scratch_.data(), &fc_);
  row_step_core(y_.data().data(), y_.rows(), y_.cols(), a_.row(i), c_.row(i),
                z_.row(i), 1.0 / rows_a_.weights[i], scratch_.data(),
                e_.data().data(), &fc_);
  gs_row_step_core(x_.data().data(), x_.cols(), e_.rows(), e_.cols(),
                   b_.row(l), l, 1.0 / rows_b_.weights[l], e_.data().data(),
                   &fc_);
}

DrekPhase1::DrekPhase1(const DenseMatrix& a, const DenseMatrix& c)
    : a_(a),
      c_(c),
      rows_a_(weights_or(a, Axis::Row, ErrorCode::ZeroRow, "solve_drek A")),
      cols_a_(weights_or(a, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_drek A")),
      acols_(column_major_copy(a)),
      z_(c.rows(), c.cols(), c.data()),
      y_(a.cols(), c.cols()),
      scratch_(c.cols()) {
  if (a.rows() != c.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "solve_drek: A, C rows differ");
  }
}

void DrekPhase1::step(RandomSource& rng) {
  const std::size_t i = sample_index(rows_a_, rng);
  const std::size_t j = sample_index(cols_a_, rng);
  project_out_core(z_.data().data(), z_.rows(), z_.cols(),
                   acols_.data() + j * a_.rows(), 1.0 / cols_a_.weights[j],
                   scratch_.data(), &fc_);
  row_step_core(y_.data().data(), y_.rows(), y_.cols(), a_.row(i), c_.row(i),
                z_.row(i), 1.0 / rows_a_.weights[i], scratch_.data(), nullptr,
                &fc_);
}

DrekPhase2::DrekPhase2(const DenseMatrix& b, const DenseMatrix& y_fixed)
    : b_(b),
      y_(y_fixed),
      rows_b_(weights_or(b, Axis::Row, ErrorCode::ZeroRow, "solve_drek B")),
      cols_b_(weights_or(b, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_drek B")),
      bcols_(column_major_copy(b)),
      w_(y_fixed.cols(), y_fixed.rows()),
      x_(y_fixed.rows(), b.rows()),
      scratch_(y_fixed.rows()) {
  if (b.cols() != y_fixed.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "solve_drek: B, Y columns differ");
  }
  for (std::size_t i = 0; i < y_.rows(); ++i)
    for (std::size_t j = 0; j < y_.cols(); ++j) w_(j, i) = y_(i, j);
}

void DrekPhase2::step(RandomSource& rng) {
  const std::size_t s = sample_index(rows_b_, rng);
  const std::size_t t = sample_index(cols_b_, rng);
  project_out_core(w_.data().data(), w_.rows(), w_.cols(), b_.row(s),
                   1.0 / rows_b_.weights[s], scratch_.data(), &fc_);
  col_step_core(x_.data().data(), x_.rows(), x_.cols(),
                bcols_.data() + t * b_.rows(), y_.data().data() + t,
                y_.cols(), w_.row(t), 1.0 / cols_b_.weights[t], &fc_);
}

DregsPhase1::DregsPhase1(const DenseMatrix& a, const DenseMatrix& c)
    : a_(a),
      c_(c),
      rows_a_(weights_or(a, Axis::Row, ErrorCode::ZeroRow, "solve_dregs A")),
      cols_a_(weights_or(a, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_dregs A")),
      acols_(column_major_copy(a)),
      f_(a.cols(), c.cols()),
      r_(c.rows(), c.cols(), c.data()),
      y_(a.cols(), c.cols()),
      w_buf_(c.cols()),
      scratch_(c.cols()) {
  if (a.rows() != c.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "solve_dregs: A, C rows differ");
  }
}

void DregsPhase1::step(RandomSource& rng) {
  const std::size_t i = sample_index(rows_a_, rng);
  const std::size_t j = sample_index(cols_a_, rng);
  gs_col_step_core(f_.row(j), r_.data().data(), a_.rows(), r_.cols(),
                   acols_.data() + j * a_.rows(), 1.0 / cols_a_.weights[j],
                   w_buf_.data(), &fc_);
  y_pull_step_core(y_.data().data(), f_.data().data(), y_.rows(), y_.cols(),
                   a_.row(i), 1.0 / rows_a_.weights[i], scratch_.data(),
                   &fc_);
}

DregsPhase2::DregsPhase2(const DenseMatrix& b, const DenseMatrix& y_fixed)
    : b_(b),
      rows_b_(weights_or(b, Axis::Row, ErrorCode::ZeroRow, "solve_dregs B")),
      cols_b_(weights_or(b, Axis::Column, ErrorCode::ZeroColumn,
                         "solve_dregs B")),
      bcols_(column_major_copy(b)),
      u_(y_fixed.rows(), b.rows()),
      e_(y_fixed.rows(), y_fixed.cols(), y_fixed.data()),
      x_(y_fixed.rows(), b.rows()) {
  if (b.cols() != y_fixed.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "solve_dregs: B, Y columns differ");
  }
}

void DregsPhase2::step(RandomSource& rng) {
  const std::size_t s = sample_index(rows_b_, rng);
  const std::size_t t = sample_index(cols_b_, rng);
  gs_row_step_core(u_.data().data(), u_.cols(), e_.rows(), e_.cols(),
                   b_.row(s), s, 1.0 / rows_b_.weights[s], e_.data().data(),
                   &fc_);
  x_pull_step_core(x_.data().data(), u_.data().data(), x_.rows(), x_.cols(),
                   bcols_.data() + t * b_.rows(), 1.0 / cols_b_.weights[t],
                   &fc_);
}

// --- drivers ---

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "Converged";
    case Termination::MaxIters:
      return "MaxIters";
    case Termination::Stagnated:
      return "Stagnated";
  }
  return "Unknown";
}

Termination termination_from_name(const std::string& name) {
  if (name == "Converged") return Termination::Converged;
  if (name == "MaxIters") return Termination::MaxIters;
  if (name == "Stagnated") return Termination::Stagnated;
  throw Error(ErrorCode::ParseError,
              "unknown termination name: " + name);
}

namespace {

void validate_config(const SolveConfig& cfg, bool two_phase) {
  if (cfg.max_iters < 1) {
    throw Error(ErrorCode::BadSpec, "SolveConfig: max_iters must be >= 1");
  }
  if (!(cfg.tol > 0.0)) {
    throw Error(ErrorCode::BadSpec, "SolveConfig: tol must be positive");
  }
  if (cfg.re_check_every < 1) {
    throw Error(ErrorCode::BadSpec,
                "SolveConfig: re_check_every must be >= 1");
  }
  if (cfg.phase_split) {
    if (!two_phase) {
      throw Error(ErrorCode::BadSpec,
                  "SolveConfig: phase_split applies to DREK/DREGS only");
    }
    if (cfg.phase_split->first < 1 || cfg.phase_split->second < 1) {
      throw Error(ErrorCode::BadSpec,
                  "SolveConfig: phase_split budgets must be >= 1");
    }
  }
}

void validate_stop(const StoppingRule& stop) {
  if (stop.mode == StoppingRule::Mode::OracleRe) {
    if (stop.reference == nullptr) {
      throw Error(ErrorCode::BadSpec, "StoppingRule: OracleRe needs a reference");
    }
    if (frobenius_norm_sq(stop.reference->x_star) == 0.0) {
      throw Error(ErrorCode::ZeroReference,
                  "StoppingRule: reference x_star is zero");
    }
  }
  if (stop.window < 1) {
    throw Error(ErrorCode::BadSpec, "StoppingRule: window must be >= 1");
  }
}

struct PhaseOut {
  std::uint64_t iters = 0;
  std::optional<double> re;
  Termination term = Termination::MaxIters;
};

// Runs one phase for up to `budget` iterations. `ref` is the oracle target
// for this phase (null in surrogate mode). Cadence and tracing use the
// global iteration index offset + k so multi-phase runs keep one grid.
template <typename It, typename Get>
PhaseOut run_phase(It& it, Get&& get, RandomSource& rng,
                   const DenseMatrix* ref, double tol, std::uint64_t budget,
                   const SolveConfig& cfg, std::uint64_t window,
                   bool stop_checks, std::uint64_t offset,
                   std::vector<std::pair<std::uint64_t, double>>* trace) {
  PhaseOut out;
  if (budget == 0) {
    if (ref) out.re = relative_error(get(it), *ref);
    return out;
  }
  std::deque<DenseMatrix> snaps;
  const std::uint64_t lag =
      (window + cfg.re_check_every - 1) / cfg.re_check_every;
  for (std::uint64_t k = 1; k <= budget; ++k) {
    it.step(rng);
    const std::uint64_t g = offset + k;
    if (cfg.trace_every > 0 && ref && g % cfg.trace_every == 0) {
      trace->push_back({g, relative_error(get(it), *ref)});
    }
    const bool at_cadence = g % cfg.re_check_every == 0;
    const bool last = k == budget;
    if (!stop_checks) {
      if (last) {
        out.iters = k;
        if (ref) out.re = relative_error(get(it), *ref);
        out.term = Termination::MaxIters;
      }
      continue;
    }
    if (ref) {
      if (at_cadence || last) {
        const double re = relative_error(get(it), *ref);
        if (re < tol) {
          out.iters = k;
          out.re = re;
          out.term = Termination::Converged;
          return out;
        }
        if (last) {
          out.iters = k;
          out.re = re;
          out.term = Termination::MaxIters;
          return out;
        }
      }
    } else {
      if (at_cadence) {
        snaps.push_back(get(it));
        if (snaps.size() > lag + 1) snaps.pop_front();
        if (snaps.size() == lag + 1) {
          const std::vector<double>& cur = snaps.back().data();
          const std::vector<double>& old = snaps.front().data();
          double diff_sq = 0.0, cur_sq = 0.0;
          for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            const double d = cur[idx] - old[idx];
            diff_sq += d * d;
            cur_sq += cur[idx] * cur[idx];
          }
          const double change =
              std::sqrt(diff_sq) / std::max(1.0, std::sqrt(cur_sq));
          if (change < tol) {
            out.iters = k;
            out.term = Termination::Stagnated;
            return out;
          }
        }
      }
      if (last) {
        out.iters = k;
        out.term = Termination::MaxIters;
        return out;
      }
    }
  }
  return out;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename It>
SolveReport drive_single(It& it, const SolveConfig& cfg,
                         const StoppingRule& stop, Clock::time_point t0) {
  RandomSource rng(cfg.seed);
  const DenseMatrix* ref = stop.mode == StoppingRule::Mode::OracleRe
                               ? &stop.reference->x_star
                               : nullptr;
  SolveReport rep;
  auto get = [](It& s) -> const DenseMatrix& { return s.x(); };
  PhaseOut out = run_phase(it, get, rng, ref, cfg.tol, cfg.max_iters, cfg,
                           stop.window, true, 0, &rep.trace);
  rep.iterations = out.iters;
  rep.final_re = out.re;
  rep.terminated = out.term;
  rep.x_final = it.x();
  rep.flops = it.flop_count().flops;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

template <typename P1, typename P2, typename MakeP2>
SolveReport drive_two_phase(P1& p1, MakeP2&& make_p2, const SolveConfig& cfg,
                            const StoppingRule& stop, Clock::time_point t0) {
  RandomSource rng(cfg.seed);
  const bool oracle = stop.mode == StoppingRule::Mode::OracleRe;
  const DenseMatrix* y_ref = oracle ? &stop.reference->y_star : nullptr;
  const DenseMatrix* x_ref = oracle ? &stop.reference->x_star : nullptr;
  if (oracle && frobenius_norm_sq(*y_ref) == 0.0) {
    throw Error(ErrorCode::ZeroReference,
                "two-phase solve: reference y_star is zero");
  }

  SolveReport rep;
  auto get_y = [](P1& s) -> const DenseMatrix& { return s.y(); };
  PhaseOut o1;
  if (cfg.phase_split) {
    o1 = run_phase(p1, get_y, rng, y_ref, cfg.tol, cfg.phase_split->first,
                   cfg, stop.window, false, 0, &rep.trace);
  } else {
    o1 = run_phase(p1, get_y, rng, y_ref, cfg.tol * 1e-2, cfg.max_iters, cfg,
                   stop.window, true, 0, &rep.trace);
  }

  const std::uint64_t budget2 =
      cfg.phase_split ? cfg.phase_split->second
                      : cfg.max_iters - o1.iters;
  P2 p2 = make_p2(p1.y());
  auto get_x = [](P2& s) -> const DenseMatrix& { return s.x(); };
  PhaseOut o2 = run_phase(p2, get_x, rng, x_ref, cfg.tol, budget2, cfg,
                          stop.window, true, o1.iters, &rep.trace);

  rep.iterations = o1.iters + o2.iters;
  rep.phase_iterations = std::make_pair(o1.iters, o2.iters);
  rep.final_re = o2.re;
  if (o2.term == Termination::Converged && o2.re && *o2.re < cfg.tol) {
    rep.terminated = Termination::Converged;
  } else if (o2.iters > 0 && o2.term == Termination::Stagnated) {
    rep.terminated = Termination::Stagnated;
  } else {
    rep.terminated = Termination::MaxIters;
  }
  rep.x_final = p2.x();
  rep.flops = p1.flop_count().flops + p2.flop_count().flops;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

}  // namespace

SolveReport solve_cme_rk(const DenseMatrix& a, const DenseMatrix& b,
                         const DenseMatrix& c, const SolveConfig& cfg,
                         const StoppingRule& stop) {
  validate_config(cfg, false);
  validate_stop(stop);
  auto t0 = Clock::now();
  CmeRkIteration it(a, b, c);
  return drive_single(it, cfg, stop, t0);
}

SolveReport solve_ime_rgs(const DenseMatrix& a, const DenseMatrix& b,
                          const DenseMatrix& c, const SolveConfig& cfg,
                          const StoppingRule& stop) {
  validate_config(cfg, false);
  validate_stop(stop);
  auto t0 = Clock::now();
  ImeRgsIteration it(a, b, c);
  return drive_single(it, cfg, stop, t0);
}

SolveReport solve_ime_rekrk(const DenseMatrix& a, const DenseMatrix& b,
                            const DenseMatrix& c, const SolveConfig& cfg,
                            const StoppingRule& stop) {
  validate_config(cfg, false);
  validate_stop(stop);
  auto t0 = Clock::now();
  ImeRekrkIteration it(a, b, c);
  return drive_single(it, cfg, stop, t0);
}

SolveReport solve_ime_rekrgs(const DenseMatrix& a, const DenseMatrix& b,
                             const DenseMatrix& c, const SolveConfig& cfg,
                             const StoppingRule& stop) {
  validate_config(cfg, false);
  validate_stop(stop);
  auto t0 = Clock::now();
  ImeRekrgsIteration it(a, b, c);
  return drive_single(it, cfg, stop, t0);
}

SolveReport solve_drek(const DenseMatrix& a, const DenseMatrix& b,
                       const DenseMatrix& c, const SolveConfig& cfg,
                       const StoppingRule& stop) {
  validate_config(cfg, true);
  validate_stop(stop);
  check_shapes(a, b, c, "solve_drek");
  auto t0 = Clock::now();
  DrekPhase1 p1(a, c);
  auto make_p2 = [&](const DenseMatrix& y) { return DrekPhase2(b, y); };
  return drive_two_phase<DrekPhase1, DrekPhase2>(p1, make_p2, cfg, stop, t0);
}

SolveReport solve_dregs(const DenseMatrix& a, const DenseMatrix& b,
                        const DenseMatrix& c, const SolveConfig& cfg,
                        const StoppingRule& stop) {
  validate_config(cfg, true);
  validate_stop(stop);
  check_shapes(a, b, c, "solve_dregs");
  auto t0 = Clock::now();
  DregsPhase1 p1(a, c);
  auto make_p2 = [&](const DenseMatrix& y) { return DregsPhase2(b, y); };
  return drive_two_phase<DregsPhase1, DregsPhase2>(p1, make_p2, cfg, stop, t0);
}

}  // namespace axb
