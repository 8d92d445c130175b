#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "critsos/sdpsolve/sdp_problem.hpp"

namespace critsos {
namespace sdp {

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kMaxIterations,
  kNumericalFailure,
};

const char* to_string(SolveStatus status);

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  double eig_tol = 1e-7;
  int max_iterations = 200;
  int verbosity = 0;

  /// Throws std::invalid_argument unless every tolerance is positive.
  void validate() const;
};

struct Residuals {
  double primal = 0.0;        // ||b - A(X) - B w||_inf
  double dual = 0.0;          // max(||Z - A*(y)||_max, ||c - B^T y||_inf)
  double gap = 0.0;           // dual objective - primal objective
  double relative_gap = 0.0;  // |gap| / (1 + |pobj| + |dobj|)
};

struct SdpSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective = 0.0;       // primal objective (Gamma for relaxations)
  double dual_objective = 0.0;  // b^T y
  std::vector<Eigen::MatrixXd> block_values;
  std::vector<double> free_values;
  std::vector<double> dual_values;  // y, one per equality
  std::vector<Eigen::MatrixXd> dual_slacks;
  Residuals residuals;
  int iterations = 0;
  std::string message;
};

/// Anything that can solve an SdpProblem to the SdpSolution contract.
class SdpSolver {
 public:
  virtual ~SdpSolver() = default;
  virtual std::string name() const = 0;
  virtual SdpSolution solve(const SdpProblem& problem,
                            const SolverSettings& settings) const = 0;
};

/// Dense primal-dual path-following method (HKM direction, Mehrotra
/// predictor-corrector, free variables kept in the Newton system).
class ReferenceIpm final : public SdpSolver {
 public:
  std::string name() const override { return "reference-ipm"; }
  SdpSolution solve(const SdpProblem& problem,
                    const SolverSettings& settings) const override;
};

SdpSolution reference_ipm(const SdpProblem& problem,
                          const SolverSettings& settings);

/// Solves with `solver`, or the reference method when null.
SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings,
                  const SdpSolver* solver = nullptr);

/// Residuals of a candidate point recomputed from the problem data.
Residuals compute_residuals(const SdpProblem& problem,
                            const SdpSolution& solution);

inline constexpr const char* kUnboundedDiagnostic =
    "relaxation admits every Gamma: the critical variety may be empty or the "
    "truncated ideal contains 1 at this degree";

}  // namespace sdp
}  // namespace critsos
