#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "critsos/certify/local_minimize.hpp"
#include "critsos/certify/conditions.hpp"
#include "critsos/critical/critical.hpp"
#include "critsos/polyring/parse.hpp"
#include "test_util.hpp"

using namespace critsos;
using critsos::critical::IdealMode;
using poly::Polynomial;
using poly::Rational;

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

Polynomial P(const Problem& p, const std::string& text) {
  return poly::parse_poly(text, p.vars);
}

}  // namespace

TEST(Subsets, Labels) {
  EXPECT_EQ(subset_label(0, 3), "{}");
  EXPECT_EQ(subset_label(0b101, 3), "{1,3}");
  EXPECT_EQ(subset_members(0b110, 3), (std::vector<std::size_t>{1, 2}));
}

TEST(GProduct, Examples) {
  Problem p = paraboloid();
  EXPECT_EQ(critical::g_product(p, 0), P(p, "1"));
  EXPECT_EQ(critical::g_product(p, 1), P(p, "x - y^2 - z^2"));
  Problem q = make({"x"}, "x", {"x", "1 - x"});
  EXPECT_EQ(critical::g_product(q, 0b11), P(q, "x - x^2"));
  EXPECT_THROW(critical::g_product(q, 0b100), std::out_of_range);
}

TEST(Jacobian, Examples) {
  Problem p = paraboloid();
  auto a0 = critical::build_jacobian(p, 0);
  ASSERT_EQ(a0.rows(), 1u);
  ASSERT_EQ(a0.cols(), 3u);
  EXPECT_EQ(a0(0, 0), P(p, "1"));
  EXPECT_TRUE(a0(0, 1).is_zero());
  auto a1 = critical::build_jacobian(p, 1);
  ASSERT_EQ(a1.rows(), 2u);
  EXPECT_EQ(a1(1, 0), P(p, "1"));
  EXPECT_EQ(a1(1, 1), P(p, "-2*y"));
  EXPECT_EQ(a1(1, 2), P(p, "-2*z"));
  Problem c = make({"x", "y"}, "5");
  auto ac = critical::build_jacobian(c, 0);
  EXPECT_TRUE(ac(0, 0).is_zero() && ac(0, 1).is_zero());
}

TEST(HPoly, Examples) {
  Problem p = paraboloid();
  EXPECT_EQ(critical::h_poly(p, 0), P(p, "1"));
  EXPECT_EQ(critical::h_poly(p, 1), P(p, "4*y^2 + 4*z^2"));
  Problem same = make({"x", "y"}, "x - y^2", {"x - y^2"});
  EXPECT_TRUE(critical::h_poly(same, 1).is_zero());
}

TEST(CriticalGenerators, Paraboloid) {
  Problem p = paraboloid();
  auto gens = critical::critical_generators(p);
  EXPECT_EQ(gens.mode, IdealMode::kCritical);
  ASSERT_EQ(gens.entries.size(), 2u);
  EXPECT_EQ(gens.entries[0].subset, 0u);
  EXPECT_EQ(gens.entries[0].polynomial, P(p, "4*y^2 + 4*z^2"));
  EXPECT_EQ(gens.entries[1].subset, 1u);
  EXPECT_EQ(gens.entries[1].polynomial, P(p, "x - y^2 - z^2"));
}

TEST(CriticalGenerators, MotzkinIsGradientNormSquared) {
  Problem m = make({"x", "y"}, "1 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2");
  auto gens = critical::critical_generators(m);
  ASSERT_EQ(gens.entries.size(), 1u);
  Polynomial fx = poly::differentiate(m.objective, 0);
  Polynomial fy = poly::differentiate(m.objective, 1);
  EXPECT_EQ(gens.entries[0].polynomial, fx * fx + fy * fy);
  EXPECT_EQ(gens.entries[0].polynomial.degree(), 10);
}

TEST(CriticalGenerators, ConstantObjective) {
  auto gens = critical::critical_generators(make({"x", "y"}, "3"));
  ASSERT_EQ(gens.entries.size(), 1u);
  EXPECT_TRUE(gens.entries[0].polynomial.is_zero());
}

TEST(CriticalGenerators, CountIsTwoToTheS) {
  std::mt19937 rng(21);
  for (std::size_t s = 0; s <= 4; ++s) {
    Problem p = testutil::random_problem(rng, 2, s, 2);
    auto gens = critical::critical_generators(p);
    ASSERT_EQ(gens.entries.size(), std::size_t{1} << s);
    for (std::size_t i = 0; i < gens.entries.size(); ++i)
      EXPECT_EQ(gens.entries[i].subset, i);
  }
}

TEST(CriticalGenerators, CapOnConstraints) {
  Problem p = make({"x"}, "x");
  for (int j = 0; j < 13; ++j) p.constraints.push_back(P(p, "1 - x^2"));
  EXPECT_THROW(critical::critical_generators(p), std::invalid_argument);
}

TEST(GradientGenerators, Examples) {
  Problem m = make({"x"}, "6*x^2 + 8*x^3 + 3*x^4");
  auto g = critical::gradient_generators(m);
  EXPECT_EQ(g.mode, IdealMode::kGradient);
  ASSERT_EQ(g.entries.size(), 1u);
  EXPECT_EQ(g.entries[0].polynomial, P(m, "12*x*(x+1)^2"));

  Problem x2 = make({"x", "y"}, "x^2");
  auto g2 = critical::gradient_generators(x2);
  ASSERT_EQ(g2.entries.size(), 2u);
  EXPECT_EQ(g2.entries[0].polynomial, P(x2, "2*x"));
  EXPECT_TRUE(g2.entries[1].polynomial.is_zero());

  auto g3 = critical::gradient_generators(make({"x", "y", "z"}, "7"));
  ASSERT_EQ(g3.entries.size(), 3u);
  for (const auto& e : g3.entries) EXPECT_TRUE(e.polynomial.is_zero());

  EXPECT_THROW(critical::gradient_generators(paraboloid()), std::invalid_argument);
}

TEST(IsCriticalPoint, Examples) {
  std::vector<double> origin = {0, 0, 0};
  EXPECT_TRUE(critical::is_critical_point(paraboloid(), origin, 1e-8).is_critical);
  std::vector<double> off = {1, 0, 0};
  auto r = critical::is_critical_point(paraboloid(), off, 1e-8);
  EXPECT_FALSE(r.is_critical);
  ASSERT_EQ(r.residuals.size(), 2u);
  EXPECT_DOUBLE_EQ(r.residuals[1], 1.0);
  Problem m = make({"x", "y"}, "1 + x^4*y^2 + x^2*y^4 - 3*x^2*y^2");
  std::vector<double> one = {1, 1};
  EXPECT_TRUE(critical::is_critical_point(m, one, 1e-8).is_critical);
}

TEST(Properties, ShiftInvariance) {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    Problem p = testutil::random_problem(rng, 1 + trial % 3, trial % 3, 3);
    auto base = critical::critical_generators(p);
    for (int k = 0; k < 5; ++k) {
      Problem q = p;
      q.objective += Polynomial::constant(p.nvars(), testutil::random_rational(rng, 50, 7));
      auto shifted = critical::critical_generators(q);
      ASSERT_EQ(shifted.entries.size(), base.entries.size());
      for (std::size_t i = 0; i < base.entries.size(); ++i)
        EXPECT_EQ(shifted.entries[i].polynomial, base.entries[i].polynomial);
    }
  }
}

TEST(Properties, CauchyBinet) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const std::size_t s = trial % 3;
    Problem p = testutil::random_problem(rng, n, s, 3);
    for (Subset j = 0; j < (Subset{1} << s); ++j) {
      Polynomial h = critical::h_poly(p, j);
      auto a = critical::build_jacobian(p, j);
      for (int k = 0; k < 3; ++k) {
        auto pt = testutil::random_point(rng, n);
        Rational hv = poly::evaluate(h, std::span<const Rational>(pt));
        EXPECT_EQ(hv, testutil::sum_squared_minors(testutil::evaluate_matrix(a, pt)));
        EXPECT_GE(hv, 0);
      }
    }
  }
}

TEST(Properties, DependentGradientsGiveZero) {
  std::mt19937 rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    Problem p = testutil::random_problem(rng, 3, 2, 3);
    p.objective = p.constraints[trial % 2];
    const Subset j = Subset{1} << (trial % 2);
    EXPECT_TRUE(critical::h_poly(p, j).is_zero());
    EXPECT_TRUE(critical::h_poly(p, 0b11).is_zero());
  }
}

TEST(Properties, LocalMinimizersAreCritical) {
  // Feasible, regular local minima found by descent lie on the critical variety.
  std::mt19937 rng(25);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 8; ++trial) {
    Problem p;
    p.vars = {"x", "y"};
    // coercive objective plus a random quadratic constraint
    p.objective = poly::parse_poly("x^4 + y^4", p.vars) + testutil::random_poly(rng, 2, 2);
    p.constraints.push_back(poly::parse_poly("2 - x^2 - y^2", p.vars) +
                            testutil::random_poly(rng, 2, 1, 2));
    std::vector<double> start = {u(rng), u(rng)};
    auto res = certify::local_minimize(p, start);
    if (res.status != certify::LocalMinStatus::kConverged) continue;
    auto reg = certify::check_regularity(p, res.point, 1e-6, 1e-6);
    if (!reg.regular) continue;
    ++checked;
    const double scale = 1 + std::abs(res.value);
    EXPECT_TRUE(critical::is_critical_point(p, res.point, 1e-6 * scale).is_critical)
        << "trial " << trial;
  }
  EXPECT_GE(checked, 5);
}

TEST(Modes, ParseAndPrint) {
  EXPECT_EQ(critical::parse_ideal_mode("critical"), IdealMode::kCritical);
  EXPECT_EQ(critical::parse_ideal_mode("gradient"), IdealMode::kGradient);
  EXPECT_STREQ(critical::to_string(IdealMode::kGradient), "gradient");
  EXPECT_THROW(critical::parse_ideal_mode("kkt"), std::invalid_argument);
}
