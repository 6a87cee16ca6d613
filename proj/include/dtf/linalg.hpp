#pragma once

#include <cstddef>
#include <vector>

#include "dtf/field.hpp"

namespace dtf {

/// Dense row-major matrix over K.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, FieldElem(0L)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  FieldElem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const FieldElem& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix without(std::size_t row, std::size_t col) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<FieldElem> data_;
};

FieldElem determinant(Matrix m);

struct LinearSolution {
  bool consistent = false;
  std::vector<FieldElem> particular;  // free unknowns set to zero
  std::vector<std::size_t> free_columns;
  FieldElem obstruction;  // nonzero reduced right-hand side of a 0 == r row
};

/// Gaussian elimination for A u = rhs over K.
LinearSolution solve_linear(Matrix a, std::vector<FieldElem> rhs);

}  // namespace dtf
