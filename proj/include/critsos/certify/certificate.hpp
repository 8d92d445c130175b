#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "critsos/critical/critical.hpp"
#include "critsos/polyring/polynomial.hpp"
#include "critsos/sdpsolve/solver.hpp"
#include "critsos/sosrelax/sosrelax.hpp"

namespace critsos {
namespace certify {

/// weight * p^2
struct SquareTerm {
  double weight = 0.0;
  poly::Polynomial p;
};

/// sigma_e = sum weight_i * p_i^2, multiplying the preordering word g^e.
struct SosTerm {
  Subset e = 0;
  std::vector<SquareTerm> squares;
};

struct IdealMultiplier {
  Subset subset = 0;  // J, or the variable index in gradient mode
  poly::Polynomial phi;
};

/// f - gamma = sum_e sigma_e g^e + sum_J phi_J gen_J.
/// All coefficients are exactly representable doubles.
struct Certificate {
  double gamma = 0.0;
  int d = 0;
  critical::IdealMode mode = critical::IdealMode::kCritical;
  std::vector<SosTerm> sos_terms;
  std::vector<IdealMultiplier> ideal_multipliers;
};

inline constexpr double kDefaultEigCut = 1e-7;

/// Eigendecomposes each Gram block and keeps eigenpairs above eig_cut; the
/// multipliers phi_J come straight from the free variables. Throws
/// std::invalid_argument unless the solution is optimal.
Certificate extract_certificate(const sdp::SdpSolution& solution,
                                const sosrelax::Relaxation& relaxation,
                                double eig_cut = kDefaultEigCut);

struct VerificationReport {
  bool passed = false;
  double max_residual = 0.0;  // ||R||_inf over coefficients
  double threshold = 0.0;     // tol * (1 + ||f||_inf)
  bool degrees_ok = true;     // every product has degree <= 2d
  poly::Polynomial residual;
};

/// Recomputes R = f - gamma - sum sigma_e g^e - sum phi_J gen_J exactly over
/// the rationals, rebuilding the words and generators from the problem. Throws
/// std::invalid_argument when the certificate does not fit the problem.
VerificationReport verify_certificate(const Problem& problem,
                                      const Certificate& cert, double tol);

/// sigma_e as a single polynomial.
poly::Polynomial sos_polynomial(const SosTerm& term, std::size_t nvars);

/// Line-oriented text with polynomials in the parser grammar:
///
///   critsos-certificate 1
///   vars: x, y, z
///   mode: critical
///   d: 1
///   gamma: 0
///   sos {}: 1 | y
///   ideal {1}: 0
///
/// Numbers use 17 significant digits so reading back reproduces every double.
std::string serialize_certificate(const Certificate& cert,
                                  const std::vector<std::string>& vars);
Certificate parse_certificate(std::string_view text,
                              const std::vector<std::string>& vars);

}  // namespace certify
}  // namespace critsos
