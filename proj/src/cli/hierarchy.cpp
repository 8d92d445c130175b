#include "critsos/cli/hierarchy.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "critsos/sdpsolve/sdpa.hpp"
#include "critsos/sosrelax/sosrelax.hpp"

namespace critsos {
namespace cli {

void apply_options(const ProblemOptions& o, HierarchySettings& s) {
  if (o.mode) s.mode = *o.mode;
  if (o.d_min) s.d_min = *o.d_min;
  if (o.d_max) s.d_max = *o.d_max;
  if (o.tol_feas) s.solver.feas_tol = *o.tol_feas;
  if (o.tol_gap) s.solver.gap_tol = *o.tol_gap;
  if (o.tol_eig) s.solver.eig_tol = *o.tol_eig;
  if (o.max_iter) s.solver.max_iterations = *o.max_iter;
  if (o.tol_conv) s.conv_tol = *o.tol_conv;
  if (o.tol_eig_cut) s.eig_cut = *o.tol_eig_cut;
  if (o.tol_verify) s.verify_tol = *o.tol_verify;
}

int default_d_min(const Problem& problem) {
  const int deg = std::max(problem.objective.degree(), 0);
  return std::max(1, (deg + 1) / 2);
}

HierarchyResult run_hierarchy(const Problem& problem, const HierarchySettings& settings) {
  validate(problem);
  settings.solver.validate();
  const int lowest = std::max(1, (std::max(problem.objective.degree(), 0) + 1) / 2);
  const int d_min = settings.d_min.value_or(default_d_min(problem));
  const int d_max = settings.d_max.value_or(d_min + 4);
  if (d_min < lowest) {
    throw std::invalid_argument("dmin must be at least ceil(deg f / 2) = " +
                                std::to_string(lowest));
  }
  if (d_max < d_min) throw std::invalid_argument("dmax is smaller than dmin");
  if (settings.mode == critical::IdealMode::kGradient && problem.num_constraints() > 0) {
    throw std::invalid_argument("gradient mode is only defined without constraints");
  }
  if (!settings.export_sdpa_dir.empty()) {
    std::filesystem::create_directories(settings.export_sdpa_dir);
  }

  HierarchyResult result;
  result.mode = settings.mode;
  result.d_min = d_min;
  result.d_max = d_max;
  result.conv_tol = settings.conv_tol;
  if (problem.num_constraints() > kWarnConstraints) {
    result.warnings.push_back("large constraint count: the preordering has 2^" +
                              std::to_string(problem.num_constraints()) + " words");
  }

  const critical::GeneratorSet gens = critical::build_generators(problem, settings.mode);
  std::optional<std::size_t> prev_index;

  for (int d = d_min; d <= d_max; ++d) {
    HierarchyRow row;
    row.d = d;
    const sosrelax::Relaxation relax = sosrelax::assemble_relaxation(problem, gens, d);
    row.log = relax.log;
    for (const auto& block : relax.sdp.blocks) row.block_dims.push_back(static_cast<int>(block.dim));
    row.num_equalities = relax.sdp.equalities.size();
    row.num_free = relax.sdp.free_vars.size();

    if (!settings.export_sdpa_dir.empty()) {
      const auto path = std::filesystem::path(settings.export_sdpa_dir) /
                        ("relaxation_d" + std::to_string(d) + ".dat-s");
      std::ofstream out(path);
      out << sdp::export_sdpa(relax.sdp);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      row.sdpa_path = path.string();
    }

    if (settings.trace_penalties.empty()) {
      throw std::invalid_argument("at least one trace penalty is required");
    }
    const auto t0 = std::chrono::steady_clock::now();
    sdp::SdpSolution sol;
    sosrelax::Relaxation attempt_relax = relax;
    for (double eps : settings.trace_penalties) {
      attempt_relax = relax;
      sosrelax::add_trace_penalty(attempt_relax, eps);
      sol = sdp::solve(attempt_relax.sdp, settings.solver);
      ++row.attempts;
      row.trace_penalty = eps;
      if (sol.status == sdp::SolveStatus::kOptimal ||
          sol.status == sdp::SolveStatus::kInfeasible ||
          sol.status == sdp::SolveStatus::kUnbounded) {
        break;
      }
      row.log.push_back("solve with trace penalty " + std::to_string(eps) + " ended " +
                        sdp::to_string(sol.status) + " (" + sol.message + ")");
    }
    row.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.status = sol.status;
    row.primal_objective = sol.objective;
    row.bound = sol.free_values.empty() ? sol.objective : sol.free_values[relax.gamma_index];
    row.dual_bound = sol.dual_objective;
    row.iterations = sol.iterations;
    row.residuals = sol.residuals;
    row.diagnostic = sol.message;

    if (sol.status == sdp::SolveStatus::kOptimal) {
      row.certificate = certify::extract_certificate(sol, attempt_relax, settings.eig_cut);
      row.verification =
          certify::verify_certificate(problem, *row.certificate, settings.verify_tol);
      row.verification->residual = poly::Polynomial(problem.nvars());  // keep rows small
    } else if (sol.status == sdp::SolveStatus::kUnbounded) {
      row.diagnostic = std::string(sdp::kUnboundedDiagnostic) +
                       "; the infimum is probably not attained";
    }

    result.rows.push_back(std::move(row));
    const HierarchyRow& cur = result.rows.back();
    const HierarchyRow* previous = prev_index ? &result.rows[*prev_index] : nullptr;
    if (previous && previous->status == sdp::SolveStatus::kOptimal &&
        cur.status == sdp::SolveStatus::kOptimal) {
      if (cur.bound < previous->bound - 10.0 * settings.solver.gap_tol * (1.0 + std::abs(previous->bound))) {
        result.monotone = false;
        result.warnings.push_back("bound decreased from d=" + std::to_string(previous->d) +
                                  " to d=" + std::to_string(cur.d));
      }
      if (!result.stabilized && std::abs(cur.bound - previous->bound) <= settings.conv_tol) {
        result.stabilized = true;
        result.stabilized_at = previous->d;
        if (settings.stop_on_stabilization) break;
      }
    }
    if (cur.status == sdp::SolveStatus::kOptimal) prev_index = result.rows.size() - 1;
  }
  return result;
}

int exit_code(const HierarchyResult& result) {
  bool any_optimal = false;
  for (const auto& row : result.rows) {
    if (row.status == sdp::SolveStatus::kUnbounded) return 3;
    any_optimal = any_optimal || row.status == sdp::SolveStatus::kOptimal;
  }
  return any_optimal ? 0 : 2;
}

}  // namespace cli
}  // namespace critsos
