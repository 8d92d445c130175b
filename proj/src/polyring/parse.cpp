#include "critsos/polyring/parse.hpp"

#include <cctype>
#include <optional>

namespace critsos {
namespace poly {

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error("position " + std::to_string(position) + ": " +
                         message),
      position_(position),
      message_(message) {}

namespace {

constexpr int kMaxExponent = 1000;

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vars)
      : text_(text), vars_(vars) {}

  Polynomial parse() {
    skip_space();
    if (at_end()) throw ParseError(pos_, "empty expression");
    Polynomial p = expr();
    skip_space();
    if (!at_end()) {
      throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    }
    return p;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (accept('*')) {
        acc *= unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Polynomial divisor = unary();
        if (!divisor.is_constant()) {
          throw ParseError(at, "division by a non-constant expression");
        }
        if (divisor.is_zero()) throw ParseError(at, "division by zero");
        acc = scale(acc, 1 / divisor.constant_term());
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power_expr();
  }

  Polynomial power_expr() {
    Polynomial base = primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t at = pos_;
    if (peek() == '-') throw ParseError(at, "negative exponent");
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      throw ParseError(at, "expected a non-negative integer exponent");
    }
    long exponent = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      exponent = exponent * 10 + (text_[pos_] - '0');
      if (exponent > kMaxExponent) {
        throw ParseError(at, "exponent exceeds " + std::to_string(kMaxExponent));
      }
      ++pos_;
    }
    if (peek() == '.') throw ParseError(pos_, "exponent must be an integer");
    return power(base, static_cast<int>(exponent));
  }

  Polynomial primary() {
    skip_space();
    const std::size_t start = pos_;
    if (at_end()) throw ParseError(pos_, "unexpected end of expression");
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Polynomial::constant(vars_.size(), number());
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                           peek() == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) return Polynomial::variable(vars_.size(), i);
      }
      throw ParseError(start,
                       "unknown identifier '" + std::string(name) + "'");
    }
    throw ParseError(start, std::string("unexpected '") + c + "'");
  }

  // Exact decimal: digits[.digits][e[+-]digits] -> integer / 10^k.
  Rational number() {
    const std::size_t start = pos_;
    std::string digits;
    int scale10 = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      digits += text_[pos_++];
    }
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += text_[pos_++];
        --scale10;
      }
    }
    if (digits.empty()) throw ParseError(start, "malformed number");
    if (peek() == 'e' || peek() == 'E') {
      const std::size_t save = pos_;
      ++pos_;
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;  // not an exponent; let the caller see the 'e'
      } else {
        int e = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          e = e * 10 + (text_[pos_++] - '0');
          if (e > 4000) throw ParseError(start, "decimal exponent too large");
        }
        scale10 += sign * e;
      }
    }
    mpz_class numerator(digits, 10);
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10,
                  static_cast<unsigned long>(scale10 < 0 ? -scale10 : scale10));
    Rational value = scale10 >= 0 ? Rational(numerator * ten_pow)
                                  : Rational(numerator, ten_pow);
    value.canonicalize();
    return value;
  }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_poly(std::string_view text,
                      std::span<const std::string> vars) {
  return Parser(text, vars).parse();
}

}  // namespace poly
}  // namespace critsos
