#include "critsos/critical/critical.hpp"

#include <cmath>
#include <exception>
#include <algorithm>
#include <thread>
#include <iostream>
#include <stdexcept>

namespace critsos {

using poly::Polynomial;
using poly::PolyMatrix;

void validate(const Problem& problem) {
  const std::size_t n = problem.nvars();
  if (n == 0) throw std::invalid_argument("problem has no variables");
  if (problem.objective.nvars() != n) {
    throw std::invalid_argument("objective variable count does not match");
  }
  for (const Polynomial& g : problem.constraints) {
    if (g.nvars() != n) {
      throw std::invalid_argument("constraint variable count does not match");
    }
  }
  if (problem.num_constraints() > kMaxConstraints) {
    throw std::invalid_argument(
        "too many constraints: " + std::to_string(problem.num_constraints()) +
        " > " + std::to_string(kMaxConstraints));
  }
}

std::vector<std::size_t> subset_members(Subset subset, std::size_t s) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < s; ++j) {
    if (subset & (Subset{1} << j)) out.push_back(j);
  }
  return out;
}

std::string subset_label(Subset subset, std::size_t s) {
  std::string out = "{";
  bool first = true;
  for (std::size_t j : subset_members(subset, s)) {
    if (!first) out += ",";
    out += std::to_string(j + 1);
    first = false;
  }
  return out + "}";
}

namespace critical {

const char* to_string(IdealMode mode) {
  return mode == IdealMode::kCritical ? "critical" : "gradient";
}

IdealMode parse_ideal_mode(const std::string& text) {
  if (text == "critical") return IdealMode::kCritical;
  if (text == "gradient") return IdealMode::kGradient;
  throw std::invalid_argument("unknown mode '" + text +
                              "' (expected critical or gradient)");
}

namespace {

void check_subset(const Problem& problem, Subset subset) {
  const std::size_t s = problem.num_constraints();
  if (s < 32 && (subset >> s) != 0) {
    throw std::out_of_range("subset refers to a constraint index above " +
                            std::to_string(s));
  }
}

}  // namespace

Polynomial g_product(const Problem& problem, Subset subset) {
  check_subset(problem, subset);
  Polynomial out = Polynomial::constant(problem.nvars(), 1);
  for (std::size_t j : subset_members(subset, problem.num_constraints())) {
    out *= problem.constraints[j];
  }
  return out;
}

PolyMatrix build_jacobian(const Problem& problem, Subset subset) {
  check_subset(problem, subset);
  const std::size_t n = problem.nvars();
  const auto members = subset_members(subset, problem.num_constraints());
  PolyMatrix a(members.size() + 1, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(0, i) = poly::differentiate(problem.objective, i);
  }
  for (std::size_t r = 0; r < members.size(); ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      a(r + 1, i) = poly::differentiate(problem.constraints[members[r]], i);
    }
  }
  return a;
}

Polynomial h_poly(const Problem& problem, Subset subset) {
  const PolyMatrix a = build_jacobian(problem, subset);
  return poly::poly_matrix_det(a * a.transpose());
}

GeneratorSet critical_generators(const Problem& problem) {
  validate(problem);
  const std::size_t s = problem.num_constraints();
  if (s > kWarnConstraints) {
    std::cerr << "warning: " << s << " constraints give " << (1u << s)
              << " critical generators\n";
  }
  const Subset full = static_cast<Subset>((Subset{1} << s) - 1);
  const std::size_t count = std::size_t{1} << s;

  std::vector<Polynomial> results(count);
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t j = first; j < count; j += stride) {
      try {
        Polynomial h = h_poly(problem, full & ~static_cast<Subset>(j));
        results[j] = h.is_zero()
                         ? std::move(h)
                         : g_product(problem, static_cast<Subset>(j)) * h;
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(
      count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  GeneratorSet out;
  out.mode = IdealMode::kCritical;
  out.entries.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.entries.push_back({static_cast<Subset>(j), std::move(results[j])});
  }
  return out;
}

GeneratorSet gradient_generators(const Problem& problem) {
  validate(problem);
  if (problem.num_constraints() != 0) {
    throw std::invalid_argument(
        "gradient mode requires an unconstrained problem (s = 0)");
  }
  GeneratorSet out;
  out.mode = IdealMode::kGradient;
  for (std::size_t i = 0; i < problem.nvars(); ++i) {
    out.entries.push_back(
        {static_cast<Subset>(i), poly::differentiate(problem.objective, i)});
  }
  return out;
}

GeneratorSet build_generators(const Problem& problem, IdealMode mode) {
  return mode == IdealMode::kCritical ? critical_generators(problem)
                                      : gradient_generators(problem);
}

CriticalPointCheck is_critical_point(const GeneratorSet& generators,
                                     std::span<const double> point,
                                     double tol) {
  CriticalPointCheck out;
  out.is_critical = true;
  for (const Generator& gen : generators.entries) {
    const double value = std::abs(poly::evaluate(gen.polynomial, point));
    const double threshold =
        tol * (1.0 + gen.polynomial.coefficient_norm1().get_d());
    out.residuals.push_back(value);
    out.thresholds.push_back(threshold);
    if (!(value <= threshold)) out.is_critical = false;
  }
  return out;
}

CriticalPointCheck is_critical_point(const Problem& problem,
                                     std::span<const double> point,
                                     double tol) {
  if (point.size() != problem.nvars()) {
    throw std::invalid_argument("point has wrong length");
  }
  return is_critical_point(critical_generators(problem), point, tol);
}

}  // namespace critical
}  // namespace critsos
