#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "critsos/critical/critical.hpp"
#include "critsos/polyring/parse.hpp"
#include "critsos/sdpsolve/solver.hpp"
#include "critsos/sosrelax/sosrelax.hpp"
#include "test_util.hpp"

using namespace critsos;
using critsos::critical::IdealMode;
using poly::Monomial;
using poly::Polynomial;

namespace {

Problem make(std::vector<std::string> vars, const std::string& f,
             const std::vector<std::string>& gs = {}) {
  Problem p;
  p.vars = std::move(vars);
  p.objective = poly::parse_poly(f, p.vars);
  for (const auto& g : gs) p.constraints.push_back(poly::parse_poly(g, p.vars));
  return p;
}

Problem paraboloid() { return make({"x", "y", "z"}, "x", {"x - y^2 - z^2"}); }
Problem motzkin() { return make({"x", "y"}, "1 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2"); }

sosrelax::Relaxation relax(const Problem& p, int d, IdealMode mode = IdealMode::kCritical) {
  return sosrelax::assemble_relaxation(p, critical::build_generators(p, mode), d);
}

std::size_t binom(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(MonomialBasis, Examples) {
  auto b = sosrelax::monomial_basis(3, 1);
  ASSERT_EQ(b.size(), 4u);
  EXPECT_TRUE(b[0].is_one());
  EXPECT_EQ(b[1], (Monomial{1, 0, 0}));
  EXPECT_EQ(b[2], (Monomial{0, 1, 0}));
  EXPECT_EQ(b[3], (Monomial{0, 0, 1}));
  EXPECT_EQ(sosrelax::monomial_basis(2, 2).size(), 6u);
  auto one = sosrelax::monomial_basis(1, 0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].is_one());
  for (std::size_t n = 1; n <= 4; ++n)
    for (int d = 0; d <= 4; ++d)
      EXPECT_EQ(sosrelax::monomial_basis(n, d).size(), binom(n + d, d));
}

TEST(PreorderingTerms, Examples) {
  auto t = sosrelax::preordering_terms(paraboloid(), 1);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].e, 0u);
  EXPECT_EQ(t[0].gram_basis.size(), 4u);
  EXPECT_EQ(t[1].e, 1u);
  EXPECT_EQ(t[1].gram_basis.size(), 1u);

  for (int d = 1; d <= 3; ++d) {
    auto m = sosrelax::preordering_terms(motzkin(), d);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].e, 0u);
    EXPECT_EQ(m[0].gram_basis.size(), binom(2 + d, d));
  }

  Problem two = make({"x", "y"}, "x", {"1 - x^2", "1 - y^2"});
  std::vector<std::string> omitted;
  auto t2 = sosrelax::preordering_terms(two, 1, &omitted);
  ASSERT_EQ(t2.size(), 3u);
  for (const auto& term : t2) EXPECT_NE(term.e, 3u);
  ASSERT_EQ(omitted.size(), 1u);
  EXPECT_NE(omitted[0].find("{1,2}"), std::string::npos);
  EXPECT_EQ(sosrelax::preordering_terms(two, 2).size(), 4u);
}

TEST(Assemble, ParaboloidShape) {
  auto rel = relax(paraboloid(), 1);
  ASSERT_EQ(rel.sdp.blocks.size(), 2u);
  EXPECT_EQ(rel.sdp.blocks[0].dim, 4u);
  EXPECT_EQ(rel.sdp.blocks[1].dim, 1u);
  EXPECT_EQ(rel.sdp.free_vars.size(), 3u);
  EXPECT_EQ(rel.gamma_index, 0u);
  EXPECT_EQ(rel.sdp.equalities.size(), 10u);
  EXPECT_EQ(rel.sdp.objective[rel.gamma_index], 1.0);
  ASSERT_EQ(rel.ideal.size(), 2u);
  for (const auto& term : rel.ideal) EXPECT_EQ(term.multiplier_basis.size(), 1u);
  EXPECT_NO_THROW(rel.sdp.validate());
}

TEST(Assemble, MotzkinShapes) {
  auto r4 = relax(motzkin(), 4);
  ASSERT_EQ(r4.sdp.blocks.size(), 1u);
  EXPECT_EQ(r4.sdp.blocks[0].dim, 15u);
  EXPECT_TRUE(r4.ideal.empty());
  EXPECT_EQ(r4.sdp.free_vars.size(), 1u);

  auto r5 = relax(motzkin(), 5);
  EXPECT_EQ(r5.sdp.blocks[0].dim, 21u);
  ASSERT_EQ(r5.ideal.size(), 1u);
  EXPECT_EQ(r5.ideal[0].multiplier_basis.size(), 1u);
  EXPECT_EQ(r5.sdp.free_vars.size(), 2u);
}

TEST(Assemble, EqualityCountsMatchFormula) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 1 + trial % 3;
    Problem p = testutil::random_problem(rng, n, 0, 2);
    const int d = 1 + trial % 3;
    auto rel = relax(p, d);
    EXPECT_EQ(rel.sdp.blocks[0].dim, binom(n + d, d));
    // s = 0: the Gram block alone reaches every monomial of degree <= 2d
    EXPECT_EQ(rel.sdp.equalities.size(), binom(n + 2 * d, 2 * d));
    EXPECT_EQ(rel.equality_monomials.size(), rel.sdp.equalities.size());
  }
}

TEST(Assemble, ZeroGeneratorDropped) {
  Problem c = make({"x"}, "3");
  auto rel = relax(c, 1);
  EXPECT_TRUE(rel.ideal.empty());
  bool noted = false;
  for (const auto& line : rel.log) noted = noted || line.find("zero") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(Assemble, Errors) {
  EXPECT_THROW(relax(motzkin(), 2), std::invalid_argument);
  EXPECT_THROW(relax(paraboloid(), 0), std::invalid_argument);
  Problem empty;
  EXPECT_THROW(sosrelax::assemble_relaxation(empty, {}, 1), std::invalid_argument);
}

TEST(Assemble, Deterministic) {
  auto a = relax(paraboloid(), 2);
  auto b = relax(paraboloid(), 2);
  ASSERT_EQ(a.sdp.equalities.size(), b.sdp.equalities.size());
  for (std::size_t i = 0; i < a.sdp.equalities.size(); ++i) {
    EXPECT_EQ(a.sdp.equalities[i].label, b.sdp.equalities[i].label);
    EXPECT_EQ(a.sdp.equalities[i].rhs, b.sdp.equalities[i].rhs);
    EXPECT_EQ(a.sdp.equalities[i].block_entries.size(), b.sdp.equalities[i].block_entries.size());
  }
}

TEST(Solve, ParaboloidOptimumIsZero) {
  auto rel = relax(paraboloid(), 1);
  auto sol = sdp::solve(rel.sdp, {});
  ASSERT_EQ(sol.status, sdp::SolveStatus::kOptimal) << sol.message;
  EXPECT_NEAR(sol.free_values[rel.gamma_index], 0.0, 1e-6);
}

TEST(Solve, ConstantObjective) {
  for (double c : {3.0, -2.5}) {
    Problem p = make({"x"}, c > 0 ? "3" : "-2.5");
    auto rel = relax(p, 1);
    sosrelax::add_trace_penalty(rel, 1e-8);
    auto sol = sdp::solve(rel.sdp, {});
    ASSERT_EQ(sol.status, sdp::SolveStatus::kOptimal) << sol.message;
    EXPECT_NEAR(sol.free_values[rel.gamma_index], c, 1e-6);
  }
}

TEST(Probe, Paraboloid) {
  const Problem p = paraboloid();
  const auto gens = critical::critical_generators(p);
  auto at0 = sosrelax::feasibility_probe(p, gens, 1, 0.0);
  EXPECT_EQ(at0.membership, sosrelax::Membership::kFeasible);
  EXPECT_NEAR(at0.margin, 0.0, 1e-6);
  auto at1 = sosrelax::feasibility_probe(p, gens, 1, 1.0);
  EXPECT_EQ(at1.membership, sosrelax::Membership::kInfeasible);
  EXPECT_NEAR(at1.margin, -1.0, 1e-6);
  auto low = sosrelax::feasibility_probe(p, gens, 1, -1e9);
  EXPECT_EQ(low.membership, sosrelax::Membership::kFeasible);
}

TEST(Probe, UnboundedCountsAsFeasible) {
  Problem p = make({"x"}, "x");
  auto r = sosrelax::feasibility_probe(p, critical::critical_generators(p), 1, 100.0);
  EXPECT_EQ(r.membership, sosrelax::Membership::kFeasible);
  EXPECT_EQ(r.status, sdp::SolveStatus::kUnbounded);
}

TEST(TracePenalty, WritesDiagonalObjective) {
  auto rel = relax(paraboloid(), 1);
  sosrelax::add_trace_penalty(rel, 1e-6);
  std::size_t diag = 0;
  for (const auto& e : rel.sdp.block_objective) {
    EXPECT_EQ(e.row, e.col);
    EXPECT_DOUBLE_EQ(e.value, -1e-6);
    ++diag;
  }
  EXPECT_EQ(diag, rel.sdp.total_psd_dim());
  auto sol = sdp::solve(rel.sdp, {});
  ASSERT_EQ(sol.status, sdp::SolveStatus::kOptimal);
  // still a valid lower bound, only slightly lower
  EXPECT_LE(sol.free_values[rel.gamma_index], 1e-6);
  EXPECT_GE(sol.free_values[rel.gamma_index], -1e-4);
}

TEST(Properties, LowerBoundSoundness) {
  // Gamma never exceeds f at feasible sample points.
  const Problem p = paraboloid();
  for (int d = 1; d <= 2; ++d) {
    auto rel = relax(p, d);
    auto sol = sdp::solve(rel.sdp, {});
    ASSERT_EQ(sol.status, sdp::SolveStatus::kOptimal);
    const double gamma = sol.free_values[rel.gamma_index];
    std::mt19937 rng(32);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> pt = {u(rng), u(rng), u(rng)};
      pt[0] = std::abs(pt[0]) + pt[1] * pt[1] + pt[2] * pt[2];
      EXPECT_LE(gamma, poly::evaluate(p.objective, std::span<const double>(pt)) + 1e-6);
    }
  }
}

TEST(Properties, ReconstructionIdentity) {
  // The equality system is exactly f - Gamma = sigma + sum phi gen.
  const Problem p = paraboloid();
  auto rel = relax(p, 2);
  auto sol = sdp::solve(rel.sdp, {});
  ASSERT_EQ(sol.status, sdp::SolveStatus::kOptimal);
  const auto r = sdp::compute_residuals(rel.sdp, sol);
  EXPECT_LE(r.primal, 1e-7);
}
