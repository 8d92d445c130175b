#pragma once

#include <span>
#include <string>
#include <vector>

#include "critsos/critical/critical.hpp"

namespace critsos {
namespace certify {

struct LocalMinSettings {
  int max_outer = 60;
  int max_inner = 200;
  double grad_tol = 1e-10;        // inner stationarity
  double feas_tol = 1e-10;        // max constraint violation at exit
  double penalty = 10.0;          // initial augmented Lagrangian weight
  double penalty_growth = 10.0;
  double max_penalty = 1e12;
  double divergence_bound = 1e8;  // |x|_inf beyond this counts as divergence
};

enum class LocalMinStatus { kConverged, kMaxIterations, kDiverged };
const char* to_string(LocalMinStatus status);

struct LocalMinResult {
  LocalMinStatus status = LocalMinStatus::kMaxIterations;
  std::vector<double> point;
  double value = 0.0;
  double max_violation = 0.0;
  double kkt_residual = 0.0;  // norm of grad f - sum lambda_j grad g_j
  std::vector<double> multipliers;
  int iterations = 0;         // total inner steps
  std::string message;
};

/// Augmented Lagrangian descent with damped Newton inner steps on exact
/// polynomial derivatives. Best effort; no global guarantee.
LocalMinResult local_minimize(const Problem& problem, std::span<const double> start,
                              const LocalMinSettings& settings = {});

}  // namespace certify
}  // namespace critsos
