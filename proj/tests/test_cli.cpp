#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "critsos/cli/hierarchy.hpp"
#include "critsos/cli/problem_file.hpp"
#include "critsos/cli/report.hpp"
#include "critsos/polyring/parse.hpp"

using namespace critsos;
using namespace critsos::cli;
using json = nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
  return std::string(CRITSOS_FIXTURES) + "/" + name;
}

HierarchyResult run_fixture(const std::string& name, std::optional<int> dmax = {}) {
  ProblemFile pf = load_problem(fixture(name));
  HierarchySettings settings;
  apply_options(pf.options, settings);
  if (dmax) settings.d_max = dmax;
  return run_hierarchy(pf.problem, settings);
}

json strip_timing(json j) {
  for (auto& row : j["rows"]) row.erase("solve_seconds");
  return j;
}

}  // namespace

TEST(ProblemFile, LoadsParaboloid) {
  ProblemFile pf = load_problem(fixture("paraboloid.prob"));
  EXPECT_EQ(pf.problem.nvars(), 3u);
  EXPECT_EQ(pf.problem.num_constraints(), 1u);
  EXPECT_EQ(pf.problem.vars, (std::vector<std::string>{"x", "y", "z"}));
  ASSERT_EQ(pf.minimizers.size(), 1u);
  EXPECT_EQ(pf.minimizers[0], (std::vector<double>{0, 0, 0}));
}

TEST(ProblemFile, Options) {
  ProblemFile pf = parse_problem_file(
      "vars: x\nobjective: x^2\nmode: gradient\ndmin: 2\ndmax: 5\n"
      "tol-feas: 1e-9\ntol-gap: 2e-9\ntol-eig: 3e-8\nmax-iter: 50\n"
      "tol-conv: 1e-5\ntol-eig-cut: 1e-6\ntol-verify: 1e-4\n");
  EXPECT_EQ(pf.options.mode, critical::IdealMode::kGradient);
  EXPECT_EQ(pf.options.d_min, 2);
  EXPECT_EQ(pf.options.d_max, 5);
  EXPECT_EQ(pf.options.tol_feas, 1e-9);
  EXPECT_EQ(pf.options.max_iter, 50);
  HierarchySettings s;
  apply_options(pf.options, s);
  EXPECT_EQ(s.solver.gap_tol, 2e-9);
  EXPECT_EQ(s.solver.eig_tol, 3e-8);
  EXPECT_EQ(s.conv_tol, 1e-5);
  EXPECT_EQ(s.eig_cut, 1e-6);
  EXPECT_EQ(s.verify_tol, 1e-4);
  EXPECT_EQ(s.mode, critical::IdealMode::kGradient);
}

TEST(ProblemFile, UnknownIdentifierNamed) {
  try {
    load_problem(fixture("bad_identifier.prob"));
    FAIL();
  } catch (const ProblemFileError& e) {
    EXPECT_EQ(e.line(), 3u);
    // "constraint: 1 - x^2 - w": w sits in column 23
    EXPECT_EQ(e.column(), 23u);
    EXPECT_NE(std::string(e.what()).find("'w'"), std::string::npos) << e.what();
  }
}

TEST(ProblemFile, Errors) {
  auto column_of = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_problem_file(text);
    } catch (const ProblemFileError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  EXPECT_EQ(column_of("vars: x, x\nobjective: x\n").first, 1u);
  EXPECT_EQ(column_of("vars: x\nobjective: x\nbogus: 1\n"), (std::pair<std::size_t, std::size_t>{3, 1}));
  EXPECT_EQ(column_of("vars: x\nobjective: x +\n").first, 2u);
  EXPECT_EQ(column_of("vars: x\nvars: y\nobjective: x\n").first, 2u);
  EXPECT_EQ(column_of("vars: x\nobjective: x\ndmin: 0\n").first, 3u);
  EXPECT_EQ(column_of("vars: x\nobjective: x\nminimizer: 1, 2\n").first, 3u);
  EXPECT_EQ(column_of("vars: x\nobjective: x\nmode: kkt\n").first, 3u);
  EXPECT_THROW(parse_problem_file("objective: x\n"), ProblemFileError);
  EXPECT_THROW(parse_problem_file("vars: x\n"), ProblemFileError);
  EXPECT_THROW(load_problem(fixture("does_not_exist.prob")), ProblemFileError);
}

TEST(ProblemFile, CommentsAndBlankLines) {
  ProblemFile pf = parse_problem_file(
      "# header\n\nvars: x, y   # two of them\nobjective: x^2 + y^2\n"
      "constraint: 1 - x\nconstraint: 1 - y\n");
  EXPECT_EQ(pf.problem.num_constraints(), 2u);
}

TEST(ParsePoint, Examples) {
  EXPECT_EQ(parse_point("1, 2.5, -3"), (std::vector<double>{1, 2.5, -3}));
  EXPECT_EQ(parse_point("0"), (std::vector<double>{0}));
  EXPECT_THROW(parse_point("1,,2"), std::invalid_argument);
  EXPECT_THROW(parse_point("a"), std::invalid_argument);
}

TEST(Hierarchy, Paraboloid) {
  auto r = run_fixture("paraboloid.prob", 2);
  ASSERT_GE(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].d, 1);
  EXPECT_EQ(r.rows[0].status, sdp::SolveStatus::kOptimal);
  EXPECT_NEAR(r.rows[0].bound, 0.0, 1e-6);
  ASSERT_TRUE(r.rows[0].verification.has_value());
  EXPECT_TRUE(r.rows[0].verification->passed);
  EXPECT_TRUE(r.stabilized);
  EXPECT_EQ(r.stabilized_at, 1);
  EXPECT_EQ(exit_code(r), 0);
}

TEST(Hierarchy, Quartic) {
  auto r = run_fixture("quartic.prob");
  EXPECT_EQ(r.d_min, 2);
  EXPECT_EQ(r.d_max, 6);
  bool reached = false;
  for (const auto& row : r.rows)
    if (row.status == sdp::SolveStatus::kOptimal && std::abs(row.bound) <= 1e-6 && row.d <= 4)
      reached = true;
  EXPECT_TRUE(reached);
  EXPECT_TRUE(r.monotone);
}

TEST(Hierarchy, UnboundedEveryRow) {
  auto r = run_fixture("x_unbounded.prob", 3);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, sdp::SolveStatus::kUnbounded);
    EXPECT_NE(row.diagnostic.find("admits every Gamma"), std::string::npos);
    EXPECT_NE(row.diagnostic.find("not attained"), std::string::npos);
  }
  EXPECT_EQ(exit_code(r), 3);
}

TEST(Hierarchy, MonotoneOnAllFixtures) {
  for (const char* name : {"paraboloid.prob", "quartic.prob", "motzkin.prob", "x2.prob"}) {
    ProblemFile pf = load_problem(fixture(name));
    HierarchySettings s;
    apply_options(pf.options, s);
    s.stop_on_stabilization = false;
    auto r = run_hierarchy(pf.problem, s);
    EXPECT_TRUE(r.monotone) << name;
    const HierarchyRow* prev = nullptr;
    for (const auto& row : r.rows) {
      if (row.status != sdp::SolveStatus::kOptimal) continue;
      if (prev) {
        EXPECT_LE(prev->bound, row.bound + 1e-7) << name << " d=" << row.d;
      }
      prev = &row;
    }
  }
}

TEST(Hierarchy, InputValidation) {
  ProblemFile pf = load_problem(fixture("motzkin.prob"));
  HierarchySettings s;
  s.d_min = 2;
  EXPECT_THROW(run_hierarchy(pf.problem, s), std::invalid_argument);
  s.d_min = 4;
  s.d_max = 3;
  EXPECT_THROW(run_hierarchy(pf.problem, s), std::invalid_argument);
  ProblemFile para = load_problem(fixture("paraboloid.prob"));
  HierarchySettings g;
  g.mode = critical::IdealMode::kGradient;
  EXPECT_THROW(run_hierarchy(para.problem, g), std::invalid_argument);
  EXPECT_EQ(default_d_min(pf.problem), 3);
}

TEST(Hierarchy, AllRowsFailedExitCode) {
  ProblemFile pf = load_problem(fixture("paraboloid.prob"));
  HierarchySettings s;
  s.solver.max_iterations = 1;
  s.d_max = 2;
  auto r = run_hierarchy(pf.problem, s);
  for (const auto& row : r.rows) EXPECT_NE(row.status, sdp::SolveStatus::kOptimal);
  EXPECT_EQ(exit_code(r), 2);
}

TEST(Report, TableHasMonotoneBoundColumn) {
  auto r = run_fixture("paraboloid.prob", 2);
  HierarchySettings s;
  s.d_max = 2;
  s.stop_on_stabilization = false;
  r = run_hierarchy(load_problem(fixture("paraboloid.prob")).problem, s);
  ASSERT_EQ(r.rows.size(), 2u);
  const std::string text = report(load_problem(fixture("paraboloid.prob")).problem, r,
                                  ReportFormat::kTable);
  EXPECT_NE(text.find("bound"), std::string::npos);
  EXPECT_NE(text.find("stabilized at d=1"), std::string::npos);
  EXPECT_NE(text.find("heuristic"), std::string::npos);
  // one line per row, in increasing d
  EXPECT_LT(text.find("\n   1  optimal"), text.find("\n   2  optimal"));
}

TEST(Report, StructuredCarriesEveryField) {
  ProblemFile pf = load_problem(fixture("paraboloid.prob"));
  HierarchySettings s;
  s.d_max = 2;
  auto r = run_hierarchy(pf.problem, s);
  std::vector<certify::BhcReport> bhc = {certify::check_bhc(pf.problem, pf.minimizers[0])};
  json j = json::parse(report(pf.problem, r, ReportFormat::kStructured, bhc));
  for (const char* key : {"problem", "mode", "d_min", "d_max", "rows", "stabilized",
                          "stabilized_at", "stabilization_is_heuristic", "conv_tol",
                          "monotone", "warnings", "bhc"})
    EXPECT_TRUE(j.contains(key)) << key;
  const json& row = j["rows"][0];
  for (const char* key : {"d", "status", "bound", "iterations", "residuals", "block_dims",
                          "num_equalities", "num_free", "diagnostic", "verification",
                          "certificate", "solve_seconds", "trace_penalty", "attempts"})
    EXPECT_TRUE(row.contains(key)) << key;
  EXPECT_EQ(row["status"], "optimal");
  EXPECT_EQ(row["block_dims"], json::array({4, 1}));
  auto cert = certify::parse_certificate(row["certificate"].get<std::string>(), pf.problem.vars);
  EXPECT_TRUE(certify::verify_certificate(pf.problem, cert, 1e-5).passed);
  EXPECT_EQ(j["bhc"][0]["verdict"], "holds");
  EXPECT_EQ(parse_report_format("structured"), ReportFormat::kStructured);
  EXPECT_THROW(parse_report_format("xml"), std::invalid_argument);
}

TEST(Report, Deterministic) {
  ProblemFile pf = load_problem(fixture("quartic.prob"));
  HierarchySettings s;
  auto a = run_hierarchy(pf.problem, s);
  auto b = run_hierarchy(pf.problem, s);
  json ja = strip_timing(json::parse(report(pf.problem, a, ReportFormat::kStructured)));
  json jb = strip_timing(json::parse(report(pf.problem, b, ReportFormat::kStructured)));
  EXPECT_EQ(ja, jb);
}

TEST(Report, UnboundedDiagnosticShown) {
  ProblemFile pf = load_problem(fixture("x_unbounded.prob"));
  HierarchySettings s;
  s.d_max = 1;
  auto r = run_hierarchy(pf.problem, s);
  const std::string text = report(pf.problem, r, ReportFormat::kTable);
  EXPECT_NE(text.find("unbounded"), std::string::npos);
  EXPECT_NE(text.find("not attained"), std::string::npos);
}
