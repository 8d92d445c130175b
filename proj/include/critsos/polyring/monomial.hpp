#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace critsos {
namespace poly {

/// Exponent vector x_1^{a_1} ... x_n^{a_n} over a fixed number of variables.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exponents_(nvars, 0) {}
  explicit Monomial(std::vector<int> exponents);
  Monomial(std::initializer_list<int> exponents)
      : Monomial(std::vector<int>(exponents)) {}

  /// x_index^power in nvars variables.
  static Monomial variable(std::size_t nvars, std::size_t index,
                           int power = 1);

  std::size_t nvars() const { return exponents_.size(); }
  int degree() const { return degree_; }
  int operator[](std::size_t i) const { return exponents_[i]; }
  std::span<const int> exponents() const { return exponents_; }
  bool is_one() const { return degree_ == 0; }

  Monomial operator*(const Monomial& other) const;
  /// True when every exponent of `other` is <= the matching one here.
  bool divisible_by(const Monomial& other) const;
  /// Requires divisible_by(other).
  Monomial operator/(const Monomial& other) const;

  bool operator==(const Monomial& other) const = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded reverse-lexicographic comparison: higher total degree is larger;
/// on ties the monomial whose last differing exponent is smaller is larger.
std::strong_ordering grevlex_compare(const Monomial& a, const Monomial& b);

struct GrevlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return grevlex_compare(a, b) < 0;
  }
};

struct GrevlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return grevlex_compare(a, b) > 0;
  }
};

/// All monomials in nvars variables with total degree <= max_degree, by
/// ascending degree and, within a degree, descending grevlex. For three
/// variables and degree one this is [1, x, y, z].
std::vector<Monomial> monomials_up_to(std::size_t nvars, int max_degree);

/// C(nvars + max_degree, max_degree).
std::size_t count_monomials_up_to(std::size_t nvars, int max_degree);

}  // namespace poly
}  // namespace critsos
