#include "dtf/linalg.hpp"

#include <utility>

#include "dtf/error.hpp"

namespace dtf {

Matrix Matrix::without(std::size_t row, std::size_t col) const {
  Matrix out(rows_ - 1, cols_ - 1);
  for (std::size_t r = 0, rr = 0; r < rows_; ++r) {
    if (r == row) continue;
    for (std::size_t c = 0, cc = 0; c < cols_; ++c) {
      if (c == col) continue;
      out(rr, cc++) = (*this)(r, c);
    }
    ++rr;
  }
  return out;
}

namespace {

// Prefers the structurally smallest pivot to limit expression growth.
std::size_t pick_pivot(const Matrix& m, std::size_t col, std::size_t from) {
  std::size_t best = m.rows();
  std::size_t best_size = 0;
  for (std::size_t r = from; r < m.rows(); ++r) {
    if (m(r, col).is_zero()) continue;
    const std::size_t size = m(r, col).num().size() + m(r, col).den().size();
    if (best == m.rows() || size < best_size) {
      best = r;
      best_size = size;
    }
  }
  return best;
}

}  // namespace

FieldElem determinant(Matrix m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::TypeError, "determinant of a non-square matrix");
  const std::size_t n = m.rows();
  FieldElem det(1L);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t p = pick_pivot(m, c, c);
    if (p == n) return FieldElem(0L);
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m(p, k), m(c, k));
      det = -det;
    }
    const FieldElem pivot = m(c, c);
    det *= pivot;
    const FieldElem inv = pivot.inverse();
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m(r, c).is_zero()) continue;
      const FieldElem factor = m(r, c) * inv;
      for (std::size_t k = c + 1; k < n; ++k) m(r, k) -= factor * m(c, k);
    }
  }
  return det;
}

LinearSolution solve_linear(Matrix a, std::vector<FieldElem> rhs) {
  const std::size_t rows = a.rows(), cols = a.cols();
  if (rhs.size() != rows) throw Error(ErrorCode::TypeError, "right-hand side length mismatch");
  std::vector<std::size_t> pivot_col_of_row;
  std::size_t row = 0;
  LinearSolution out;
  for (std::size_t c = 0; c < cols && row < rows; ++c) {
    const std::size_t p = pick_pivot(a, c, row);
    if (p == rows) {
      out.free_columns.push_back(c);
      continue;
    }
    if (p != row) {
      for (std::size_t k = 0; k < cols; ++k) std::swap(a(p, k), a(row, k));
      std::swap(rhs[p], rhs[row]);
    }
    const FieldElem inv = a(row, c).inverse();
    for (std::size_t k = c; k < cols; ++k) a(row, k) *= inv;
    rhs[row] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || a(r, c).is_zero()) continue;
      const FieldElem factor = a(r, c);
      for (std::size_t k = c; k < cols; ++k) a(r, k) -= factor * a(row, k);
      rhs[r] -= factor * rhs[row];
    }
    pivot_col_of_row.push_back(c);
    ++row;
  }
  for (std::size_t c = pivot_col_of_row.empty() ? 0 : pivot_col_of_row.back() + 1; c < cols; ++c) {
    bool listed = false;
    for (auto f : out.free_columns) listed = listed || f == c;
    if (!listed) out.free_columns.push_back(c);
  }
  for (std::size_t r = row; r < rows; ++r) {
    if (!rhs[r].is_zero()) {
      out.consistent = false;
      out.obstruction = rhs[r];
      return out;
    }
  }
  out.consistent = true;
  out.particular.assign(cols, FieldElem(0L));
  for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r) out.particular[pivot_col_of_row[r]] = rhs[r];
  return out;
}

}  // namespace dtf
