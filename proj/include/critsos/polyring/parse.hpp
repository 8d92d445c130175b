#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "critsos/polyring/polynomial.hpp"

namespace critsos {
namespace poly {

/// Syntax or semantic error in a polynomial expression. position() is the
/// 0-based byte offset in the input where the problem was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

/// Parses an arithmetic expression over `vars`.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' integer)?
///   primary := number | identifier | '(' expr ')'
///   number  := digits ('.' digits)? (('e' | 'E') ('+' | '-')? digits)?
///
/// Decimal literals are converted exactly. Division is only allowed by a
/// nonzero constant, which covers rational literals such as 3/4.
Polynomial parse_poly(std::string_view text,
                      std::span<const std::string> vars);

}  // namespace poly
}  // namespace critsos
