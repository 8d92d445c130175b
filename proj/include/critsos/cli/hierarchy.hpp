#pragma once

#include <optional>
#include <string>
#include <vector>

#include "critsos/certify/certificate.hpp"
#include "critsos/certify/conditions.hpp"
#include "critsos/cli/problem_file.hpp"
#include "critsos/critical/critical.hpp"
#include "critsos/sdpsolve/solver.hpp"

namespace critsos {
namespace cli {

struct HierarchySettings {
  critical::IdealMode mode = critical::IdealMode::kCritical;
  std::optional<int> d_min;  // default ceil(deg f / 2), at least 1
  std::optional<int> d_max;  // default d_min + 4
  sdp::SolverSettings solver;
  double conv_tol = 1e-6;
  double eig_cut = certify::kDefaultEigCut;
  double verify_tol = 1e-5;
  bool stop_on_stabilization = true;
  /// Trace penalties tried in order until a solve ends optimal, infeasible
  /// or unbounded. The first entry is normally 0 (the plain relaxation).
  std::vector<double> trace_penalties = {0.0, 1e-8, 1e-7, 1e-6};
  std::string export_sdpa_dir;  // one file per level when non-empty
};

/// Overlays options from a problem file.
void apply_options(const ProblemOptions& options, HierarchySettings& settings);

int default_d_min(const Problem& problem);

struct HierarchyRow {
  int d = 0;
  sdp::SolveStatus status = sdp::SolveStatus::kNumericalFailure;
  double bound = 0.0;  // f*_d (the Gamma value), meaningful when optimal
  double primal_objective = 0.0;  // includes any trace penalty
  double dual_bound = 0.0;
  double trace_penalty = 0.0;     // penalty of the accepted attempt
  int attempts = 0;
  double solve_seconds = 0.0;
  std::vector<int> block_dims;
  std::size_t num_equalities = 0;
  std::size_t num_free = 0;
  int iterations = 0;
  sdp::Residuals residuals;
  std::string diagnostic;
  std::vector<std::string> log;
  std::optional<certify::Certificate> certificate;
  std::optional<certify::VerificationReport> verification;
  std::string sdpa_path;
};

struct HierarchyResult {
  critical::IdealMode mode = critical::IdealMode::kCritical;
  int d_min = 0;
  int d_max = 0;
  std::vector<HierarchyRow> rows;
  bool stabilized = false;  // heuristic: successive bounds within conv_tol
  int stabilized_at = 0;
  double conv_tol = 0.0;
  bool monotone = true;     // non-decreasing up to 10 gap_tol
  std::vector<std::string> warnings;
};

/// Sweeps d over [d_min, d_max]: assemble, solve, extract, verify. Solver
/// failures are recorded per row. Throws std::invalid_argument on bad input
/// (d_min below ceil(deg f / 2), gradient mode with constraints, ...).
HierarchyResult run_hierarchy(const Problem& problem, const HierarchySettings& settings);

/// 0 success, 2 when no row is optimal, 3 when any row is unbounded.
int exit_code(const HierarchyResult& result);

}  // namespace cli
}  // namespace critsos
