#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "critsos/critical/critical.hpp"
#include "critsos/polyring/monomial.hpp"
#include "critsos/polyring/polynomial.hpp"
#include "critsos/sdpsolve/sdp_problem.hpp"
#include "critsos/sdpsolve/solver.hpp"

namespace critsos {
namespace sosrelax {

/// All monomials of degree <= d in n variables, ascending degree.
std::vector<poly::Monomial> monomial_basis(std::size_t n, int d);

/// sigma_e * g_1^{e_1} ... g_s^{e_s}; e is a bitmask over constraints.
struct PreorderingTerm {
  Subset e = 0;
  poly::Polynomial word;
  std::vector<poly::Monomial> gram_basis;
};

/// phi_J * generator with phi_J ranging over multiplier_basis.
struct IdealTerm {
  Subset subset = 0;
  poly::Polynomial generator;
  std::vector<poly::Monomial> multiplier_basis;
};

/// Words of degree > 2d are dropped; `omitted` collects their labels.
std::vector<PreorderingTerm> preordering_terms(
    const Problem& problem, int d, std::vector<std::string>* omitted = nullptr);

/// Degree-d relaxation in SDP form.
///
/// Block k is the Gram matrix of preordering[k]. Free variable 0 is Gamma,
/// followed by the coefficients of each ideal term in order (starting at
/// multiplier_offset[t]). Row i matches the coefficient of
/// equality_monomials[i].
struct Relaxation {
  int d = 0;
  critical::IdealMode mode = critical::IdealMode::kCritical;
  std::vector<PreorderingTerm> preordering;
  std::vector<IdealTerm> ideal;
  std::vector<std::size_t> multiplier_offset;
  std::vector<poly::Monomial> equality_monomials;
  std::size_t gamma_index = 0;
  sdp::SdpProblem sdp;
  std::vector<std::string> log;
};

/// Throws std::invalid_argument when d < 1 or 2d < deg f.
Relaxation assemble_relaxation(const Problem& problem,
                               const critical::GeneratorSet& generators,
                               int d);

/// Subtracts epsilon * trace(X) from the objective on every Gram block. The
/// feasible set is unchanged, so Gamma stays a certified lower bound, but the
/// optimum moves down by at most epsilon * trace(X*). This restores a strict
/// dual interior when some generator times a square already fits in a Gram
/// block (e.g. s = 0, where h = |grad f|^2 is itself a sum of squares).
void add_trace_penalty(Relaxation& relaxation, double epsilon);

enum class Membership { kFeasible, kInfeasible };

struct ProbeResult {
  Membership membership = Membership::kInfeasible;
  sdp::SolveStatus status = sdp::SolveStatus::kNumericalFailure;
  /// Largest t with f - gamma - t in P_d + I_d (when the solve is optimal).
  double margin = 0.0;
};

/// Decides f - gamma in P_d + I_d. The largest admissible shift t is
/// computed; membership holds when t >= -tolerance. Throws
/// std::runtime_error if the solver neither converges nor certifies
/// infeasibility or unboundedness.
ProbeResult feasibility_probe(const Problem& problem,
                              const critical::GeneratorSet& generators, int d,
                              double gamma,
                              const sdp::SolverSettings& settings = {});

}  // namespace sosrelax
}  // namespace critsos
