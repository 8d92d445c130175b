#include "critsos/polyring/polynomial.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace critsos {
namespace poly {

namespace {

void require_same_nvars(const Polynomial& p, const Polynomial& q) {
  if (p.nvars() != q.nvars()) {
    throw std::invalid_argument("polynomial variable counts differ (" +
                                std::to_string(p.nvars()) + " vs " +
                                std::to_string(q.nvars()) + ")");
  }
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite coefficient");
  }
  return Rational(value);
}

}  // namespace

double to_double(const Rational& q) {
  // mpq_get_d truncates; step one ulp away from zero when that is closer
  const double t = q.get_d();
  if (!std::isfinite(t) || Rational(t) == q) return t;
  const double away = std::nextafter(t, q > 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(away)) return t;
  const Rational dt = abs(q - Rational(t));
  const Rational da = abs(Rational(away) - q);
  if (da < dt) return away;
  if (dt < da) return t;
  int exp_t = 0;
  const double mant = std::frexp(t, &exp_t);
  const auto bits = static_cast<long long>(std::ldexp(std::fabs(mant), 53));
  return (bits % 2 == 0) ? t : away;
}

Polynomial Polynomial::constant(std::size_t nvars, const Rational& value) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars), value);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  Polynomial p(nvars);
  p.add_term(Monomial::variable(nvars, index), 1);
  return p;
}

Polynomial Polynomial::term(const Monomial& monomial, const Rational& coeff) {
  Polynomial p(monomial.nvars());
  p.add_term(monomial, coeff);
  return p;
}

Polynomial Polynomial::from_doubles(std::size_t nvars,
                                    std::span<const Monomial> monomials,
                                    std::span<const double> coefficients) {
  if (monomials.size() != coefficients.size()) {
    throw std::invalid_argument("monomial/coefficient length mismatch");
  }
  Polynomial p(nvars);
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    if (coefficients[i] != 0.0) {
      p.add_term(monomials[i], rational_from_double(coefficients[i]));
    }
  }
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first.is_one());
}

int Polynomial::degree() const {
  return terms_.empty() ? -1 : terms_.begin()->first.degree();
}

Rational Polynomial::coefficient(const Monomial& monomial) const {
  auto it = terms_.find(monomial);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::constant_term() const {
  return coefficient(Monomial(nvars_));
}

Rational Polynomial::coefficient_norm1() const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) total += abs(c);
  return total;
}

Rational Polynomial::coefficient_norm_inf() const {
  Rational best = 0;
  for (const auto& [m, c] : terms_) {
    if (abs(c) > best) best = abs(c);
  }
  return best;
}

void Polynomial::check_nvars(const Monomial& monomial) const {
  if (monomial.nvars() != nvars_) {
    throw std::invalid_argument("monomial has " +
                                std::to_string(monomial.nvars()) +
                                " variables, polynomial has " +
                                std::to_string(nvars_));
  }
}

void Polynomial::add_term(const Monomial& monomial, const Rational& coeff) {
  check_nvars(monomial);
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(monomial, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_nvars(*this, other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_nvars(*this, other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return nvars_ == other.nvars_ && terms_ == other.terms_;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  Polynomial out = p;
  out += q;
  return out;
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) {
  Polynomial out = p;
  out -= q;
  return out;
}

Polynomial operator-(const Polynomial& p) {
  return scale(p, -1);
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  require_same_nvars(p, q);
  Polynomial out(p.nvars());
  Rational product;
  for (const auto& [mp, cp] : p.terms()) {
    for (const auto& [mq, cq] : q.terms()) {
      product = cp * cq;
      out.add_term(mp * mq, product);
    }
  }
  return out;
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }

Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial scale(const Polynomial& p, const Rational& c) {
  Polynomial out(p.nvars());
  if (c == 0) return out;
  for (const auto& [m, coeff] : p.terms()) out.add_term(m, coeff * c);
  return out;
}

Polynomial power(const Polynomial& p, int k) {
  if (k < 0) throw std::invalid_argument("negative exponent");
  Polynomial result = Polynomial::constant(p.nvars(), 1);
  Polynomial base = p;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial differentiate(const Polynomial& p, std::size_t index) {
  if (index >= p.nvars()) {
    throw std::out_of_range("differentiation index " + std::to_string(index) +
                            " out of range for " + std::to_string(p.nvars()) +
                            " variables");
  }
  Polynomial out(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    const int e = m[index];
    if (e == 0) continue;
    out.add_term(m / Monomial::variable(p.nvars(), index), c * e);
  }
  return out;
}

Rational evaluate(const Polynomial& p, std::span<const Rational> point) {
  if (point.size() != p.nvars()) {
    throw std::invalid_argument("evaluation point has wrong length");
  }
  Rational total = 0;
  Rational term;
  Rational factor;
  for (const auto& [m, c] : p.terms()) {
    term = c;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      mpz_pow_ui(factor.get_num_mpz_t(), point[i].get_num_mpz_t(), m[i]);
      mpz_pow_ui(factor.get_den_mpz_t(), point[i].get_den_mpz_t(), m[i]);
      term *= factor;
    }
    total += term;
  }
  return total;
}

double evaluate(const Polynomial& p, std::span<const double> point) {
  if (point.size() != p.nvars()) {
    throw std::invalid_argument("evaluation point has wrong length");
  }
  double total = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = to_double(c);
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      for (int k = 0; k < m[i]; ++k) term *= point[i];
    }
    total += term;
  }
  return total;
}

Polynomial divide_exact(const Polynomial& p, const Polynomial& divisor) {
  require_same_nvars(p, divisor);
  if (divisor.is_zero()) throw std::domain_error("division by zero polynomial");
  const auto& [lead_m, lead_c] = *divisor.terms().begin();
  Polynomial quotient(p.nvars());
  Polynomial remainder = p;
  while (!remainder.is_zero()) {
    const auto& [rm, rc] = *remainder.terms().begin();
    if (!rm.divisible_by(lead_m)) {
      throw std::domain_error("polynomial division is not exact");
    }
    Polynomial step = Polynomial::term(rm / lead_m, rc / lead_c);
    quotient += step;
    remainder -= step * divisor;
  }
  return quotient;
}

double max_abs_coefficient(const Polynomial& p) {
  return to_double(p.coefficient_norm_inf());
}

namespace {

std::string format_decimal(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_magnitude(const Rational& magnitude,
                             CoefficientStyle style) {
  if (style == CoefficientStyle::kDecimal) {
    return format_decimal(to_double(magnitude));
  }
  return magnitude.get_str();
}

}  // namespace

std::string to_string(const Polynomial& p, std::span<const std::string> vars,
                      CoefficientStyle style) {
  if (vars.size() != p.nvars()) {
    throw std::invalid_argument("variable name count does not match");
  }
  if (p.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = c < 0;
    if (first) {
      if (negative) out << "-";
    } else {
      out << (negative ? " - " : " + ");
    }
    first = false;
    const Rational magnitude = abs(c);
    bool wrote = false;
    if (m.is_one() || magnitude != 1) {
      out << format_magnitude(magnitude, style);
      wrote = true;
    }
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      if (wrote) out << "*";
      out << vars[i];
      if (m[i] > 1) out << "^" << m[i];
      wrote = true;
    }
  }
  return out.str();
}

Polynomial round_to_doubles(const Polynomial& p) {
  Polynomial out(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    out.add_term(m, rational_from_double(to_double(c)));
  }
  return out;
}

NumericPolynomial::NumericPolynomial(const Polynomial& p) : nvars_(p.nvars()) {
  coefficients_.reserve(p.size());
  exponents_.reserve(p.size() * nvars_);
  for (const auto& [m, c] : p.terms()) {
    coefficients_.push_back(to_double(c));
    for (std::size_t i = 0; i < nvars_; ++i) exponents_.push_back(m[i]);
  }
}

double NumericPolynomial::operator()(std::span<const double> point) const {
  if (point.size() != nvars_) {
    throw std::invalid_argument("evaluation point has wrong length");
  }
  double total = 0.0;
  const int* e = exponents_.data();
  for (double c : coefficients_) {
    double term = c;
    for (std::size_t i = 0; i < nvars_; ++i, ++e) {
      for (int k = 0; k < *e; ++k) term *= point[i];
    }
    total += term;
  }
  return total;
}

}  // namespace poly
}  // namespace critsos
