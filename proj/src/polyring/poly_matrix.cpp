#include "critsos/polyring/poly_matrix.hpp"

#include <stdexcept>
#include <utility>

namespace critsos {
namespace poly {

PolyMatrix::PolyMatrix(std::size_t rows, std::size_t cols, std::size_t nvars)
    : rows_(rows), cols_(cols), nvars_(nvars),
      entries_(rows * cols, Polynomial(nvars)) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("matrix dimensions must be positive");
  }
}

PolyMatrix PolyMatrix::transpose() const {
  PolyMatrix out(cols_, rows_, nvars_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matrix product shape mismatch");
  }
  PolyMatrix out(a.rows(), b.cols(), a.nvars());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Polynomial acc(a.nvars());
      for (std::size_t k = 0; k < a.cols(); ++k) {
        if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
        acc += a(i, k) * b(k, j);
      }
      out(i, j) = std::move(acc);
    }
  }
  return out;
}

namespace {

void require_square(const PolyMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("determinant of a non-square " +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " matrix");
  }
}

// Laplace expansion along the first row over the given column subset.
Polynomial cofactor_recursive(const PolyMatrix& m, std::size_t row,
                              std::vector<std::size_t>& cols) {
  if (cols.size() == 1) return m(row, cols[0]);
  Polynomial total(m.nvars());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Polynomial& entry = m(row, cols[k]);
    if (entry.is_zero()) continue;
    const std::size_t col = cols[k];
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
    Polynomial minor = cofactor_recursive(m, row + 1, cols);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(k), col);
    if (k % 2 == 0) {
      total += entry * minor;
    } else {
      total -= entry * minor;
    }
  }
  return total;
}

}  // namespace

Polynomial det_cofactor(const PolyMatrix& m) {
  require_square(m);
  std::vector<std::size_t> cols(m.cols());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  return cofactor_recursive(m, 0, cols);
}

Polynomial det_bareiss(const PolyMatrix& m) {
  require_square(m);
  const std::size_t n = m.rows();
  PolyMatrix a = m;
  Polynomial previous = Polynomial::constant(m.nvars(), 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k).is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a(swap_row, k).is_zero()) ++swap_row;
      if (swap_row == n) return Polynomial(m.nvars());
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(swap_row, c));
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Polynomial numer = a(k, k) * a(i, j) - a(i, k) * a(k, j);
        a(i, j) = divide_exact(numer, previous);
      }
      a(i, k) = Polynomial(m.nvars());
    }
    previous = a(k, k);
  }
  Polynomial det = a(n - 1, n - 1);
  return negate ? -det : det;
}

Polynomial poly_matrix_det(const PolyMatrix& m) {
  require_square(m);
  return m.rows() <= 4 ? det_cofactor(m) : det_bareiss(m);
}

}  // namespace poly
}  // namespace critsos
