#include "critsos/certify/local_minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "critsos/polyring/polynomial.hpp"

namespace critsos {
namespace certify {

const char* to_string(LocalMinStatus status) {
  switch (status) {
    case LocalMinStatus::kConverged: return "converged";
    case LocalMinStatus::kMaxIterations: return "max_iterations";
    case LocalMinStatus::kDiverged: return "diverged";
  }
  return "?";
}

namespace {

using poly::NumericPolynomial;

// Value, gradient and Hessian of one polynomial, in doubles.
struct Derivs {
  NumericPolynomial value;
  std::vector<NumericPolynomial> grad;
  std::vector<NumericPolynomial> hess;  // upper triangle, row-major

  explicit Derivs(const poly::Polynomial& p) : value(p) {
    const std::size_t n = p.nvars();
    for (std::size_t i = 0; i < n; ++i) {
      const poly::Polynomial di = poly::differentiate(p, i);
      grad.emplace_back(di);
      for (std::size_t j = i; j < n; ++j) hess.emplace_back(poly::differentiate(di, j));
    }
  }

  Eigen::VectorXd gradient(std::span<const double> x) const {
    Eigen::VectorXd g(static_cast<Eigen::Index>(grad.size()));
    for (std::size_t i = 0; i < grad.size(); ++i) g(static_cast<Eigen::Index>(i)) = grad[i](x);
    return g;
  }

  Eigen::MatrixXd hessian(std::span<const double> x) const {
    const auto n = static_cast<Eigen::Index>(grad.size());
    Eigen::MatrixXd H(n, n);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        H(i, j) = H(j, i) = hess[k++](x);
      }
    }
    return H;
  }
};

struct AugLag {
  const Derivs& f;
  const std::vector<Derivs>& g;
  const std::vector<double>& lambda;
  double mu;

  double value(std::span<const double> x) const {
    double v = f.value(x);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double t = std::max(0.0, lambda[j] - mu * g[j].value(x));
      v += (t * t - lambda[j] * lambda[j]) / (2.0 * mu);
    }
    return v;
  }

  void derivatives(std::span<const double> x, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    grad = f.gradient(x);
    hess = f.hessian(x);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double t = lambda[j] - mu * g[j].value(x);
      if (t <= 0.0) continue;
      const Eigen::VectorXd dg = g[j].gradient(x);
      grad -= t * dg;
      hess += mu * dg * dg.transpose() - t * g[j].hessian(x);
    }
  }
};

}  // namespace

LocalMinResult local_minimize(const Problem& problem, std::span<const double> start,
                              const LocalMinSettings& settings) {
  validate(problem);
  if (start.size() != problem.nvars()) {
    throw std::invalid_argument("start point has the wrong dimension");
  }
  const std::size_t n = problem.nvars();
  const std::size_t s = problem.num_constraints();
  const Derivs f(problem.objective);
  std::vector<Derivs> g;
  for (const auto& c : problem.constraints) g.emplace_back(c);

  LocalMinResult result;
  std::vector<double> x(start.begin(), start.end());
  std::vector<double> lambda(s, 0.0);
  double mu = settings.penalty;
  double last_violation = std::numeric_limits<double>::infinity();

  auto violation = [&](std::span<const double> p) {
    double v = 0.0;
    for (const auto& gj : g) v = std::max(v, -gj.value(p));
    return v;
  };
  auto kkt = [&](std::span<const double> p) {
    Eigen::VectorXd r = f.gradient(p);
    for (std::size_t j = 0; j < s; ++j) r -= lambda[j] * g[j].gradient(p);
    return r.norm();
  };

  std::vector<double> trial(n);
  for (int outer = 0; outer < settings.max_outer; ++outer) {
    const AugLag L{f, g, lambda, mu};
    for (int inner = 0; inner < settings.max_inner; ++inner) {
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      L.derivatives(x, grad, hess);
      if (!grad.allFinite()) {
        result.status = LocalMinStatus::kDiverged;
        result.message = "non-finite gradient";
        result.point = x;
        return result;
      }
      if (grad.norm() <= settings.grad_tol * (1.0 + std::abs(L.value(x)))) break;
      ++result.iterations;

      // Levenberg shift until the Newton matrix is positive definite.
      Eigen::VectorXd step;
      double shift = 0.0;
      for (int attempt = 0; attempt < 60; ++attempt) {
        Eigen::MatrixXd M = hess;
        M.diagonal().array() += shift;
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() == Eigen::Success) {
          step = -llt.solve(grad);
          if (step.allFinite() && step.dot(grad) < 0.0) break;
        }
        step.resize(0);
        shift = shift == 0.0 ? 1e-8 * (1.0 + hess.cwiseAbs().maxCoeff()) : shift * 10.0;
      }
      if (step.size() == 0) step = -grad;

      const double v0 = L.value(x);
      const double slope = step.dot(grad);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + alpha * step(static_cast<Eigen::Index>(i));
        const double v = L.value(trial);
        if (std::isfinite(v) && v <= v0 + 1e-4 * alpha * slope) {
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
      x = trial;
      double xmax = 0.0;
      for (double xi : x) xmax = std::max(xmax, std::abs(xi));
      if (xmax > settings.divergence_bound) {
        result.status = LocalMinStatus::kDiverged;
        result.message = "iterates left the bounded region";
        result.point = x;
        result.value = f.value(x);
        return result;
      }
    }

    for (std::size_t j = 0; j < s; ++j) {
      lambda[j] = std::max(0.0, lambda[j] - mu * g[j].value(x));
    }
    const double viol = violation(x);
    const double stat = kkt(x);
    if (viol <= settings.feas_tol &&
        stat <= std::sqrt(settings.grad_tol) * (1.0 + f.gradient(x).norm())) {
      result.status = LocalMinStatus::kConverged;
      break;
    }
    if (s == 0) {
      // No constraints: the inner loop is plain Newton and has already stopped.
      if (stat <= std::sqrt(settings.grad_tol)) result.status = LocalMinStatus::kConverged;
      break;
    }
    if (viol > 0.25 * last_violation) mu = std::min(mu * settings.penalty_growth, settings.max_penalty);
    last_violation = viol;
  }

  result.point = x;
  result.value = f.value(x);
  result.max_violation = violation(x);
  result.kkt_residual = kkt(x);
  result.multipliers = lambda;
  if (result.status != LocalMinStatus::kConverged) {
    result.message = "KKT tolerance not reached";
  }
  return result;
}

}  // namespace certify
}  // namespace critsos
