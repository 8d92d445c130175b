#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "critsos/polyring/monomial.hpp"

namespace critsos {
namespace poly {

using Rational = mpq_class;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in descending grevlex order (leading term first) and no
/// stored coefficient is zero. Values are immutable in practice; every
/// operation below returns a new polynomial.
/// Nearest double, ties to even.
double to_double(const Rational& q);

class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrevlexGreater>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& value);
  static Polynomial variable(std::size_t nvars, std::size_t index);
  static Polynomial term(const Monomial& monomial, const Rational& coeff);
  /// Exact conversion of binary doubles; each coefficient is the rational
  /// value of the double.
  static Polynomial from_doubles(
      std::size_t nvars, std::span<const Monomial> monomials,
      std::span<const double> coefficients);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  Rational coefficient(const Monomial& monomial) const;
  Rational constant_term() const;
  /// Sum of absolute values of the coefficients.
  Rational coefficient_norm1() const;
  Rational coefficient_norm_inf() const;

  /// Accumulates coeff into the term for monomial, pruning zeros.
  void add_term(const Monomial& monomial, const Rational& coeff);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);

  bool operator==(const Polynomial& other) const;

 private:
  void check_nvars(const Monomial& monomial) const;

  std::size_t nvars_ = 0;
  TermMap terms_;
};

Polynomial operator+(const Polynomial& p, const Polynomial& q);
Polynomial operator-(const Polynomial& p, const Polynomial& q);
Polynomial operator-(const Polynomial& p);
Polynomial operator*(const Polynomial& p, const Polynomial& q);

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial scale(const Polynomial& p, const Rational& c);
Polynomial power(const Polynomial& p, int k);

/// Formal partial derivative with respect to the variable at (0-based) index.
Polynomial differentiate(const Polynomial& p, std::size_t index);

Rational evaluate(const Polynomial& p, std::span<const Rational> point);
double evaluate(const Polynomial& p, std::span<const double> point);

/// Quotient q with p = q * divisor. Throws std::domain_error when the
/// division leaves a remainder.
Polynomial divide_exact(const Polynomial& p, const Polynomial& divisor);

/// Largest absolute coefficient, as a double.
double max_abs_coefficient(const Polynomial& p);

enum class CoefficientStyle {
  kExact,    // p/q rationals, bit-faithful
  kDecimal,  // nearest double printed with 17 significant digits
};

/// Prints in the input grammar, leading term first, e.g.
/// "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1".
std::string to_string(const Polynomial& p, std::span<const std::string> vars,
                      CoefficientStyle style = CoefficientStyle::kExact);

/// Replaces each coefficient by the rational value of its nearest double.
Polynomial round_to_doubles(const Polynomial& p);

/// Double-precision copy for repeated numeric evaluation.
class NumericPolynomial {
 public:
  NumericPolynomial() = default;
  explicit NumericPolynomial(const Polynomial& p);

  std::size_t nvars() const { return nvars_; }
  double operator()(std::span<const double> point) const;

 private:
  std::size_t nvars_ = 0;
  std::vector<double> coefficients_;
  std::vector<int> exponents_;  // row-major, one row of nvars_ per term
};

}  // namespace poly
}  // namespace critsos
