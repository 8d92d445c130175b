#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "critsos/polyring/poly_matrix.hpp"
#include "critsos/polyring/polynomial.hpp"

namespace critsos {

/// Minimize f over K = {x : g_j(x) >= 0, j = 1..s}.
struct Problem {
  std::vector<std::string> vars;
  poly::Polynomial objective;
  std::vector<poly::Polynomial> constraints;

  std::size_t nvars() const { return vars.size(); }
  std::size_t num_constraints() const { return constraints.size(); }
};

/// Hard cap on s; the generator set has 2^s members.
inline constexpr std::size_t kMaxConstraints = 12;
/// Above this many constraints construction logs a warning.
inline constexpr std::size_t kWarnConstraints = 6;

/// Throws std::invalid_argument when variable counts disagree, there are no
/// variables, or s exceeds kMaxConstraints.
void validate(const Problem& problem);

/// Subset J of {1..s}, bit j-1 set when j is in J.
using Subset = std::uint32_t;

std::vector<std::size_t> subset_members(Subset subset, std::size_t s);
/// "{}" or "{1,3}" with 1-based constraint indices.
std::string subset_label(Subset subset, std::size_t s);

namespace critical {

enum class IdealMode { kCritical, kGradient };

const char* to_string(IdealMode mode);
IdealMode parse_ideal_mode(const std::string& text);

struct Generator {
  Subset subset = 0;  // J for critical mode; variable index for gradient mode
  poly::Polynomial polynomial;
};

struct GeneratorSet {
  IdealMode mode = IdealMode::kCritical;
  std::vector<Generator> entries;
};

/// g_J = prod_{j in J} g_j, and 1 for the empty set.
poly::Polynomial g_product(const Problem& problem, Subset subset);

/// (|J|+1) x n matrix with rows grad f, then grad g_j for j in J ascending.
poly::PolyMatrix build_jacobian(const Problem& problem, Subset subset);

/// h_J = det(A_J A_J^T).
poly::Polynomial h_poly(const Problem& problem, Subset subset);

/// The 2^s products g_J * h_{J^c}, ordered by the bitmask of J.
GeneratorSet critical_generators(const Problem& problem);

/// The n partial derivatives of f. Only defined when s = 0.
GeneratorSet gradient_generators(const Problem& problem);

GeneratorSet build_generators(const Problem& problem, IdealMode mode);

struct CriticalPointCheck {
  bool is_critical = false;
  std::vector<double> residuals;  // |generator(point)| per generator
  std::vector<double> thresholds;
};

/// Each generator must satisfy |gen(x)| <= tol * (1 + ||gen||_1), with the
/// norm taken over coefficients.
CriticalPointCheck is_critical_point(const GeneratorSet& generators,
                                     std::span<const double> point,
                                     double tol);
CriticalPointCheck is_critical_point(const Problem& problem,
                                     std::span<const double> point,
                                     double tol);

}  // namespace critical
}  // namespace critsos
