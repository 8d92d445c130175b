#pragma once

#include <cstddef>
#include <vector>

#include "critsos/polyring/polynomial.hpp"

namespace critsos {
namespace poly {

/// Dense row-major matrix of polynomials sharing one variable count.
class PolyMatrix {
 public:
  PolyMatrix(std::size_t rows, std::size_t cols, std::size_t nvars);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nvars() const { return nvars_; }

  const Polynomial& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  Polynomial& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }

  PolyMatrix transpose() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t nvars_;
  std::vector<Polynomial> entries_;
};

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

/// Exact determinant: cofactor expansion up to 4x4, Bareiss beyond.
/// Throws std::invalid_argument for non-square input.
Polynomial poly_matrix_det(const PolyMatrix& m);

/// Fraction-free Bareiss elimination with row pivoting; exposed so it can be
/// checked against cofactor expansion on small sizes.
Polynomial det_bareiss(const PolyMatrix& m);
Polynomial det_cofactor(const PolyMatrix& m);

}  // namespace poly
}  // namespace critsos
