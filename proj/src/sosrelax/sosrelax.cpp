#include "critsos/sosrelax/sosrelax.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace critsos {
namespace sosrelax {

using poly::Monomial;
using poly::Polynomial;

std::vector<Monomial> monomial_basis(std::size_t n, int d) {
  if (n == 0) throw std::invalid_argument("monomial basis needs n >= 1");
  if (d < 0) throw std::invalid_argument("monomial basis needs d >= 0");
  return poly::monomials_up_to(n, d);
}

namespace {

std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

std::string monomial_label(const Monomial& m,
                           const std::vector<std::string>& vars) {
  return poly::to_string(Polynomial::term(m, 1), vars);
}

}  // namespace

std::vector<PreorderingTerm> preordering_terms(const Problem& problem, int d,
                                               std::vector<std::string>* omitted) {
  validate(problem);
  if (d < 1) throw std::invalid_argument("relaxation order d must be >= 1");
  const std::size_t s = problem.num_constraints();
  std::vector<PreorderingTerm> out;
  for (Subset e = 0; e < (Subset{1} << s); ++e) {
    Polynomial word = Polynomial::constant(problem.nvars(), 1);
    for (std::size_t j : subset_members(e, s)) word *= problem.constraints[j];
    const int deg = word.degree();
    if (deg < 0 || deg > 2 * d) {
      if (omitted != nullptr) {
        omitted->push_back("preordering word " + subset_label(e, s) +
                           (deg < 0 ? " is identically zero"
                                    : " has degree " + std::to_string(deg) +
                                          " > 2d = " + std::to_string(2 * d)));
      }
      continue;
    }
    PreorderingTerm term;
    term.e = e;
    term.word = std::move(word);
    term.gram_basis = monomial_basis(problem.nvars(), (2 * d - deg) / 2);
    out.push_back(std::move(term));
  }
  return out;
}

Relaxation assemble_relaxation(const Problem& problem,
                               const critical::GeneratorSet& generators,
                               int d) {
  validate(problem);
  if (d < 1) throw std::invalid_argument("relaxation order d must be >= 1");
  if (2 * d < problem.objective.degree()) {
    throw std::invalid_argument(
        "degree too small: 2d = " + std::to_string(2 * d) +
        " cannot match an objective of degree " +
        std::to_string(problem.objective.degree()));
  }
  const std::size_t n = problem.nvars();
  const std::size_t s = problem.num_constraints();
  const std::vector<std::string> vars =
      problem.vars.size() == n ? problem.vars : default_names(n);

  Relaxation rel;
  rel.d = d;
  rel.mode = generators.mode;
  rel.preordering = preordering_terms(problem, d, &rel.log);

  for (const critical::Generator& gen : generators.entries) {
    const std::string label =
        generators.mode == critical::IdealMode::kCritical
            ? subset_label(gen.subset, s)
            : "d/d" + vars[gen.subset];
    if (gen.polynomial.is_zero()) {
      rel.log.push_back("ideal generator " + label +
                        " is identically zero; dropped");
      continue;
    }
    const int deg = gen.polynomial.degree();
    if (deg > 2 * d) {
      rel.log.push_back("ideal generator " + label + " has degree " +
                        std::to_string(deg) + " > 2d = " +
                        std::to_string(2 * d) + "; omitted");
      continue;
    }
    rel.ideal.push_back(
        {gen.subset, gen.polynomial, monomial_basis(n, 2 * d - deg)});
  }

  rel.equality_monomials = monomial_basis(n, 2 * d);
  std::map<Monomial, std::size_t, poly::GrevlexLess> row_of;
  for (std::size_t i = 0; i < rel.equality_monomials.size(); ++i) {
    row_of.emplace(rel.equality_monomials[i], i);
  }
  std::vector<sdp::Equality> rows(rel.equality_monomials.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].label = monomial_label(rel.equality_monomials[i], vars);
    rows[i].rhs = poly::to_double(problem.objective.coefficient(rel.equality_monomials[i]));
  }

  sdp::SdpProblem& out = rel.sdp;
  for (std::size_t k = 0; k < rel.preordering.size(); ++k) {
    const PreorderingTerm& term = rel.preordering[k];
    out.blocks.push_back({"sigma" + subset_label(term.e, s),
                          term.gram_basis.size()});
    // Word terms converted once.
    std::vector<std::pair<Monomial, double>> word_terms;
    for (const auto& [m, c] : term.word.terms()) word_terms.emplace_back(m, poly::to_double(c));
    const auto& basis = term.gram_basis;
    for (std::size_t r = 0; r < basis.size(); ++r) {
      for (std::size_t c = r; c < basis.size(); ++c) {
        const Monomial product = basis[r] * basis[c];
        for (const auto& [wm, wc] : word_terms) {
          const std::size_t row = row_of.at(product * wm);
          rows[row].block_entries.push_back({k, r, c, wc});
        }
      }
    }
  }

  out.free_vars.push_back("gamma");
  out.objective.push_back(1.0);
  rel.gamma_index = 0;
  rows[row_of.at(Monomial(n))].free_entries.push_back({0, 1.0});

  for (const IdealTerm& term : rel.ideal) {
    rel.multiplier_offset.push_back(out.free_vars.size());
    const std::string base =
        rel.mode == critical::IdealMode::kCritical
            ? "phi" + subset_label(term.subset, s)
            : "phi_d/d" + vars[term.subset];
    std::vector<std::pair<Monomial, double>> gen_terms;
    for (const auto& [m, c] : term.generator.terms()) gen_terms.emplace_back(m, poly::to_double(c));
    for (const Monomial& mu : term.multiplier_basis) {
      const std::size_t var = out.free_vars.size();
      out.free_vars.push_back(base + "[" + monomial_label(mu, vars) + "]");
      out.objective.push_back(0.0);
      for (const auto& [gm, gc] : gen_terms) {
        rows[row_of.at(mu * gm)].free_entries.push_back({var, gc});
      }
    }
  }

  std::size_t pruned = 0;
  std::vector<Monomial> kept_monomials;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].block_entries.empty() && rows[i].free_entries.empty() &&
        rows[i].rhs == 0.0) {
      ++pruned;
      continue;
    }
    kept_monomials.push_back(rel.equality_monomials[i]);
    out.equalities.push_back(std::move(rows[i]));
  }
  rel.equality_monomials = std::move(kept_monomials);
  if (pruned > 0) {
    rel.log.push_back(std::to_string(pruned) + " empty equalities pruned");
  }
  out.validate();
  return rel;
}

void add_trace_penalty(Relaxation& relaxation, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("trace penalty must be >= 0");
  auto& sdp = relaxation.sdp;
  sdp.block_objective.clear();
  if (epsilon == 0.0) return;
  for (std::size_t k = 0; k < sdp.blocks.size(); ++k) {
    for (std::size_t i = 0; i < sdp.blocks[k].dim; ++i) {
      sdp.block_objective.push_back({k, i, i, -epsilon});
    }
  }
  relaxation.log.push_back("trace penalty " + std::to_string(epsilon) + " on Gram blocks");
}

ProbeResult feasibility_probe(const Problem& problem,
                              const critical::GeneratorSet& generators, int d,
                              double gamma,
                              const sdp::SolverSettings& settings) {
  Relaxation rel = assemble_relaxation(problem, generators, d);
  // With the constant row shifted by gamma, the Gamma column becomes the
  // margin t in f - gamma - t.
  for (std::size_t i = 0; i < rel.equality_monomials.size(); ++i) {
    if (rel.equality_monomials[i].is_one()) {
      rel.sdp.equalities[i].rhs -= gamma;
    }
  }
  rel.sdp.free_vars[rel.gamma_index] = "margin";
  const sdp::SdpSolution sol = sdp::solve(rel.sdp, settings);

  ProbeResult out;
  out.status = sol.status;
  switch (sol.status) {
    case sdp::SolveStatus::kUnbounded:
      out.membership = Membership::kFeasible;
      out.margin = std::numeric_limits<double>::infinity();
      return out;
    case sdp::SolveStatus::kInfeasible:
      out.membership = Membership::kInfeasible;
      out.margin = -std::numeric_limits<double>::infinity();
      return out;
    case sdp::SolveStatus::kOptimal: {
      out.margin = sol.objective;
      const double tolerance =
          10.0 * (settings.feas_tol + settings.gap_tol) * (1.0 + std::abs(gamma));
      out.membership = sol.objective >= -tolerance ? Membership::kFeasible
                                                   : Membership::kInfeasible;
      return out;
    }
    default:
      throw std::runtime_error(std::string("feasibility probe failed: ") +
                               sdp::to_string(sol.status) + " (" +
                               sol.message + ")");
  }
}

}  // namespace sosrelax
}  // namespace critsos
