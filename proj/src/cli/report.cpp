#include "critsos/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace critsos {
namespace cli {

using nlohmann::ordered_json;

ReportFormat parse_report_format(const std::string& text) {
  if (text == "table") return ReportFormat::kTable;
  if (text == "structured" || text == "json") return ReportFormat::kStructured;
  throw std::invalid_argument("unknown report format '" + text + "'");
}

namespace {

std::string num(double v, const char* f = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json bhc_json(const certify::BhcReport& r) {
  ordered_json j;
  j["point"] = r.point;
  j["value"] = r.value;
  j["feasible"] = r.feasible;
  std::vector<std::size_t> active;
  for (auto a : r.active_set) active.push_back(a + 1);
  j["active_set"] = active;
  j["regular"] = r.regular;
  j["singular_values"] = r.singular_values;
  j["multipliers"] = r.multipliers;
  std::vector<bool> pos(r.multiplier_positive.begin(), r.multiplier_positive.end());
  j["multiplier_positive"] = pos;
  j["multiplier_residual"] = r.multiplier_residual;
  j["reduced_hessian_min_eig"] = finite_or_null(r.reduced_hessian_min_eig);
  j["verdict"] = certify::to_string(r.verdict);
  j["reason"] = r.reason;
  return j;
}

std::string structured(const Problem& problem, const HierarchyResult& result,
                       const std::vector<certify::BhcReport>& bhc) {
  ordered_json doc;
  ordered_json p;
  p["vars"] = problem.vars;
  p["objective"] = poly::to_string(problem.objective, problem.vars);
  ordered_json cons = ordered_json::array();
  for (const auto& g : problem.constraints) cons.push_back(poly::to_string(g, problem.vars));
  p["constraints"] = cons;
  doc["problem"] = p;
  doc["mode"] = critical::to_string(result.mode);
  doc["d_min"] = result.d_min;
  doc["d_max"] = result.d_max;

  ordered_json rows = ordered_json::array();
  for (const auto& row : result.rows) {
    ordered_json r;
    r["d"] = row.d;
    r["status"] = sdp::to_string(row.status);
    r["bound"] = row.status == sdp::SolveStatus::kOptimal ? ordered_json(row.bound)
                                                          : ordered_json(nullptr);
    r["primal_objective"] = finite_or_null(row.primal_objective);
    r["dual_objective"] = finite_or_null(row.dual_bound);
    r["iterations"] = row.iterations;
    r["attempts"] = row.attempts;
    r["trace_penalty"] = row.trace_penalty;
    r["residuals"] = {{"primal", row.residuals.primal},
                      {"dual", row.residuals.dual},
                      {"gap", row.residuals.gap},
                      {"relative_gap", row.residuals.relative_gap}};
    r["block_dims"] = row.block_dims;
    r["num_equalities"] = row.num_equalities;
    r["num_free"] = row.num_free;
    r["diagnostic"] = row.diagnostic;
    r["log"] = row.log;
    r["sdpa_path"] = row.sdpa_path.empty() ? ordered_json(nullptr) : ordered_json(row.sdpa_path);
    if (row.verification) {
      r["verification"] = {{"passed", row.verification->passed},
                           {"max_residual", row.verification->max_residual},
                           {"threshold", row.verification->threshold},
                           {"degrees_ok", row.verification->degrees_ok}};
    } else {
      r["verification"] = nullptr;
    }
    r["certificate"] = row.certificate
                           ? ordered_json(certify::serialize_certificate(*row.certificate,
                                                                         problem.vars))
                           : ordered_json(nullptr);
    r["solve_seconds"] = row.solve_seconds;
    rows.push_back(r);
  }
  doc["rows"] = rows;
  doc["stabilized"] = result.stabilized;
  doc["stabilized_at"] = result.stabilized ? ordered_json(result.stabilized_at)
                                           : ordered_json(nullptr);
  doc["stabilization_is_heuristic"] = true;
  doc["conv_tol"] = result.conv_tol;
  doc["monotone"] = result.monotone;
  doc["warnings"] = result.warnings;
  ordered_json checks = ordered_json::array();
  for (const auto& r : bhc) checks.push_back(bhc_json(r));
  doc["bhc"] = checks;
  return doc.dump(2) + "\n";
}

std::string table(const Problem& problem, const HierarchyResult& result,
                  const std::vector<certify::BhcReport>& bhc) {
  std::ostringstream out;
  out << "minimize " << poly::to_string(problem.objective, problem.vars);
  if (problem.constraints.empty()) {
    out << " (unconstrained)";
  } else {
    out << " s.t.";
    for (std::size_t j = 0; j < problem.constraints.size(); ++j) {
      out << (j ? "," : "") << " " << poly::to_string(problem.constraints[j], problem.vars)
          << " >= 0";
    }
  }
  out << "\nmode " << critical::to_string(result.mode) << ", d = " << result.d_min << ".."
      << result.d_max << "\n\n";

  char line[256];
  std::snprintf(line, sizeof(line), "%4s  %-16s %18s %10s %5s %9s  %s\n", "d", "status",
                "bound", "rel.gap", "iter", "time[s]", "certificate");
  out << line;
  for (const auto& row : result.rows) {
    const bool ok = row.status == sdp::SolveStatus::kOptimal;
    std::string cert = "-";
    if (row.verification) {
      cert = std::string(row.verification->passed ? "verified" : "FAILED") + " (res " +
             num(row.verification->max_residual, "%.1e") + ")";
    }
    std::snprintf(line, sizeof(line), "%4d  %-16s %18s %10s %5d %9.3f  %s\n", row.d,
                  sdp::to_string(row.status), ok ? num(row.bound, "%.10g").c_str() : "-",
                  num(row.residuals.relative_gap, "%.1e").c_str(), row.iterations,
                  row.solve_seconds, cert.c_str());
    out << line;
  }
  out << "\n";
  if (result.stabilized) {
    out << "stabilized at d=" << result.stabilized_at << " (successive bounds within "
        << num(result.conv_tol, "%g") << "; heuristic)\n";
  } else {
    out << "not stabilized in the solved range\n";
  }
  for (const auto& row : result.rows) {
    if (row.status == sdp::SolveStatus::kUnbounded) {
      out << "d=" << row.d << ": " << row.diagnostic << "\n";
    }
  }
  for (const auto& w : result.warnings) out << "warning: " << w << "\n";
  for (const auto& r : bhc) {
    out << "BHC at (";
    for (std::size_t i = 0; i < r.point.size(); ++i) out << (i ? ", " : "") << num(r.point[i], "%g");
    out << "): " << certify::to_string(r.verdict);
    if (!r.reason.empty()) out << " - " << r.reason;
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string report(const Problem& problem, const HierarchyResult& result,
                   ReportFormat format, const std::vector<certify::BhcReport>& bhc) {
  return format == ReportFormat::kStructured ? structured(problem, result, bhc)
                                             : table(problem, result, bhc);
}

}  // namespace cli
}  // namespace critsos
