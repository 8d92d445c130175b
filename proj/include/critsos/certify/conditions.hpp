#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "critsos/critical/critical.hpp"

namespace critsos {
namespace certify {

struct RegularityReport {
  std::vector<std::size_t> active_set;  // 0-based constraint indices
  bool regular = true;
  std::vector<double> singular_values;  // of the active-gradient matrix, descending
};

/// Active when |g_j(x)| <= act_tol * (1 + ||g_j||_1); regular when the active
/// gradients have smallest singular value > rank_tol (vacuous with none active).
RegularityReport check_regularity(const Problem& problem,
                                  std::span<const double> point,
                                  double act_tol = 1e-8, double rank_tol = 1e-8);

struct BhcTolerances {
  double act_tol = 1e-8;
  double rank_tol = 1e-8;
  double res_tol = 1e-8;   // least-squares residual of the multiplier fit
  double pos_tol = 1e-8;   // multipliers must exceed this
  double pd_tol = 1e-8;    // reduced Hessian min eigenvalue must exceed this
  double zero_tol = 1e-8;  // |f(x) - level| <= zero_tol * (1 + ||f||_1)
  double level = 0.0;      // the value f is expected to take at the point
};

enum class BhcVerdict { kHolds, kFails, kInconclusive };
const char* to_string(BhcVerdict verdict);

struct BhcReport {
  std::vector<double> point;
  std::vector<std::size_t> active_set;
  bool regular = false;
  std::vector<double> singular_values;
  std::vector<double> multipliers;  // a_j, aligned with active_set
  std::vector<bool> multiplier_positive;
  double multiplier_residual = 0.0;
  double reduced_hessian_min_eig = 0.0;  // +inf when the null space is trivial
  bool feasible = true;
  double value = 0.0;                    // f(point)
  BhcVerdict verdict = BhcVerdict::kInconclusive;
  std::string reason;
};

BhcReport check_bhc(const Problem& problem, std::span<const double> point,
                    const BhcTolerances& tols = {});

/// Gradient and Hessian of a polynomial at a point, by exact differentiation.
Eigen::VectorXd gradient_at(const poly::Polynomial& p, std::span<const double> point);
Eigen::MatrixXd hessian_at(const poly::Polynomial& p, std::span<const double> point);

/// Hessian of f - sum a_j g_j restricted to the null space of the active
/// gradients. The basis comes from the SVD so it is orthonormal.
Eigen::MatrixXd reduced_lagrangian_hessian(const Problem& problem,
                                           std::span<const double> point,
                                           const std::vector<std::size_t>& active,
                                           const std::vector<double>& multipliers,
                                           double rank_tol = 1e-8);

}  // namespace certify
}  // namespace critsos
