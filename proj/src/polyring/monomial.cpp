#include "critsos/polyring/monomial.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace critsos {
namespace poly {

Monomial::Monomial(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("negative exponent in monomial");
  }
  degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

Monomial Monomial::variable(std::size_t nvars, std::size_t index, int power) {
  if (index >= nvars) throw std::out_of_range("variable index out of range");
  std::vector<int> e(nvars, 0);
  e[index] = power;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (nvars() != other.nvars()) {
    throw std::invalid_argument("monomial variable counts differ");
  }
  Monomial out = *this;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    out.exponents_[i] += other.exponents_[i];
  }
  out.degree_ += other.degree_;
  return out;
}

bool Monomial::divisible_by(const Monomial& other) const {
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] < other.exponents_[i]) return false;
  }
  return true;
}

Monomial Monomial::operator/(const Monomial& other) const {
  if (!divisible_by(other)) throw std::domain_error("monomial not divisible");
  Monomial out = *this;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    out.exponents_[i] -= other.exponents_[i];
  }
  out.degree_ -= other.degree_;
  return out;
}

std::strong_ordering grevlex_compare(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() <=> b.degree();
  for (std::size_t i = a.nvars(); i-- > 0;) {
    if (a[i] != b[i]) return b[i] <=> a[i];
  }
  return a.nvars() <=> b.nvars();
}

namespace {

void append_degree(std::size_t nvars, int degree, std::size_t var,
                   std::vector<int>& current, std::vector<Monomial>& out) {
  if (var + 1 == nvars) {
    current[var] = degree;
    out.emplace_back(current);
    current[var] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = e;
    append_degree(nvars, degree - e, var + 1, current, out);
  }
  current[var] = 0;
}

}  // namespace

std::vector<Monomial> monomials_up_to(std::size_t nvars, int max_degree) {
  if (nvars == 0) throw std::invalid_argument("need at least one variable");
  std::vector<Monomial> out;
  out.reserve(count_monomials_up_to(nvars, max_degree));
  std::vector<int> current(nvars, 0);
  for (int t = 0; t <= max_degree; ++t) {
    const std::size_t begin = out.size();
    append_degree(nvars, t, 0, current, out);
    // lex-descending generation; re-sort the degree slice into grevlex.
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(begin), out.end(),
              GrevlexGreater{});
  }
  return out;
}

std::size_t count_monomials_up_to(std::size_t nvars, int max_degree) {
  if (max_degree < 0) return 0;
  // C(n + d, d) computed incrementally; exact at every step.
  std::size_t result = 1;
  for (int k = 1; k <= max_degree; ++k) {
    result = result * (nvars + static_cast<std::size_t>(k)) /
             static_cast<std::size_t>(k);
  }
  return result;
}

}  // namespace poly
}  // namespace critsos
