#include "critsos/certify/conditions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

namespace critsos {
namespace certify {

using poly::Polynomial;

const char* to_string(BhcVerdict verdict) {
  switch (verdict) {
    case BhcVerdict::kHolds: return "holds";
    case BhcVerdict::kFails: return "fails";
    case BhcVerdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

void check_point(const Problem& problem, std::span<const double> point) {
  if (point.size() != problem.nvars()) {
    throw std::invalid_argument("point has " + std::to_string(point.size()) +
                                " coordinates, expected " +
                                std::to_string(problem.nvars()));
  }
}

Eigen::MatrixXd active_gradients(const Problem& problem,
                                 std::span<const double> point,
                                 const std::vector<std::size_t>& active) {
  Eigen::MatrixXd G(static_cast<Eigen::Index>(active.size()),
                    static_cast<Eigen::Index>(problem.nvars()));
  for (std::size_t r = 0; r < active.size(); ++r) {
    G.row(static_cast<Eigen::Index>(r)) =
        gradient_at(problem.constraints[active[r]], point).transpose();
  }
  return G;
}

// Orthonormal basis of the null space of G (k x n).
Eigen::MatrixXd null_space(const Eigen::MatrixXd& G, double rank_tol) {
  const Eigen::Index n = G.cols();
  if (G.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > rank_tol) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

Eigen::VectorXd gradient_at(const Polynomial& p, std::span<const double> point) {
  const std::size_t n = p.nvars();
  Eigen::VectorXd g(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    g(static_cast<Eigen::Index>(i)) = poly::evaluate(poly::differentiate(p, i), point);
  }
  return g;
}

Eigen::MatrixXd hessian_at(const Polynomial& p, std::span<const double> point) {
  const std::size_t n = p.nvars();
  Eigen::MatrixXd H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Polynomial di = poly::differentiate(p, i);
    for (std::size_t j = i; j < n; ++j) {
      const double v = poly::evaluate(poly::differentiate(di, j), point);
      H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return H;
}

RegularityReport check_regularity(const Problem& problem,
                                  std::span<const double> point, double act_tol,
                                  double rank_tol) {
  check_point(problem, point);
  RegularityReport report;
  for (std::size_t j = 0; j < problem.num_constraints(); ++j) {
    const Polynomial& g = problem.constraints[j];
    const double scale = 1.0 + g.coefficient_norm1().get_d();
    if (std::abs(poly::evaluate(g, point)) <= act_tol * scale) {
      report.active_set.push_back(j);
    }
  }
  if (report.active_set.empty()) return report;
  const Eigen::MatrixXd G = active_gradients(problem, point, report.active_set);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const Eigen::VectorXd sv = svd.singularValues();
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  // More active constraints than variables can never be independent.
  report.regular = G.rows() <= G.cols() && sv.size() > 0 &&
                   sv(sv.size() - 1) > rank_tol;
  return report;
}

Eigen::MatrixXd reduced_lagrangian_hessian(const Problem& problem,
                                           std::span<const double> point,
                                           const std::vector<std::size_t>& active,
                                           const std::vector<double>& multipliers,
                                           double rank_tol) {
  check_point(problem, point);
  if (active.size() != multipliers.size()) {
    throw std::invalid_argument("active set and multipliers differ in length");
  }
  Eigen::MatrixXd H = hessian_at(problem.objective, point);
  for (std::size_t r = 0; r < active.size(); ++r) {
    H -= multipliers[r] * hessian_at(problem.constraints[active[r]], point);
  }
  const Eigen::MatrixXd N = null_space(active_gradients(problem, point, active), rank_tol);
  return N.transpose() * H * N;
}

BhcReport check_bhc(const Problem& problem, std::span<const double> point,
                    const BhcTolerances& tols) {
  validate(problem);
  check_point(problem, point);
  BhcReport report;
  report.point.assign(point.begin(), point.end());

  const RegularityReport reg =
      check_regularity(problem, point, tols.act_tol, tols.rank_tol);
  report.active_set = reg.active_set;
  report.regular = reg.regular;
  report.singular_values = reg.singular_values;

  for (std::size_t j = 0; j < problem.num_constraints(); ++j) {
    const Polynomial& g = problem.constraints[j];
    const double scale = 1.0 + g.coefficient_norm1().get_d();
    if (poly::evaluate(g, point) < -tols.act_tol * scale) report.feasible = false;
  }
  report.value = poly::evaluate(problem.objective, point);
  const double f_scale = 1.0 + problem.objective.coefficient_norm1().get_d();
  const bool at_level =
      std::abs(report.value - tols.level) <= tols.zero_tol * (f_scale + std::abs(tols.level));

  // Multipliers from grad f = G^T a.
  const Eigen::MatrixXd G = active_gradients(problem, point, report.active_set);
  const Eigen::VectorXd grad_f = gradient_at(problem.objective, point);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(G.rows());
  if (G.rows() > 0) {
    a = G.transpose().colPivHouseholderQr().solve(grad_f);
  }
  report.multipliers.assign(a.data(), a.data() + a.size());
  report.multiplier_residual = (G.transpose() * a - grad_f).norm();
  bool all_positive = true;
  for (double v : report.multipliers) {
    report.multiplier_positive.push_back(v > tols.pos_tol);
    all_positive = all_positive && v > tols.pos_tol;
  }

  const Eigen::MatrixXd R = reduced_lagrangian_hessian(
      problem, point, report.active_set, report.multipliers, tols.rank_tol);
  if (R.rows() == 0) {
    report.reduced_hessian_min_eig = std::numeric_limits<double>::infinity();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R, Eigen::EigenvaluesOnly);
    report.reduced_hessian_min_eig = eig.eigenvalues()(0);
  }

  if (!report.feasible) {
    report.verdict = BhcVerdict::kInconclusive;
    report.reason = "point is not in K";
  } else if (!at_level) {
    report.verdict = BhcVerdict::kInconclusive;
    report.reason = "f does not vanish at the point (relative to the requested level)";
  } else if (!report.regular) {
    report.verdict = BhcVerdict::kInconclusive;
    report.reason = "active constraint gradients are dependent";
  } else if (report.multiplier_residual > tols.res_tol * (1.0 + grad_f.norm())) {
    report.verdict = BhcVerdict::kFails;
    report.reason = "gradient of f is not in the span of the active gradients";
  } else if (!all_positive) {
    report.verdict = BhcVerdict::kFails;
    report.reason = "an active multiplier is not strictly positive";
  } else if (!(report.reduced_hessian_min_eig > tols.pd_tol)) {
    report.verdict = BhcVerdict::kFails;
    report.reason = "reduced Hessian is not positive definite";
  } else {
    report.verdict = BhcVerdict::kHolds;
  }
  return report;
}

}  // namespace certify
}  // namespace critsos
