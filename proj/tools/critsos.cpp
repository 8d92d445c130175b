// critsos: lower bounds for polynomial minimization via the critical ideal.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "critsos/certify/certificate.hpp"
#include "critsos/certify/conditions.hpp"
#include "critsos/cli/hierarchy.hpp"
#include "critsos/cli/problem_file.hpp"
#include "critsos/cli/report.hpp"
#include "critsos/polyring/polynomial.hpp"
#include "critsos/simd/kernels.hpp"

using namespace critsos;

int main(int argc, char** argv) {
  CLI::App app{"Lower bounds for polynomial minimization over semi-algebraic sets"};
  std::string path;
  std::optional<std::string> mode;
  std::optional<int> d_min, d_max, max_iter;
  std::optional<double> tol_feas, tol_gap, tol_eig, tol_conv, tol_eig_cut, tol_verify;
  certify::BhcTolerances bhc_tols;
  std::string export_dir, cert_path, format = "table", simd;
  std::vector<std::string> bhc_points;
  std::vector<double> trace_penalties;
  bool no_early_stop = false;
  int verbosity = 0;

  app.add_option("problem", path, "problem file")->required()->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "critical or gradient")
      ->check(CLI::IsMember({"critical", "gradient"}))->envname("CRITSOS_MODE");
  app.add_option("--dmin", d_min, "first relaxation degree")->envname("CRITSOS_DMIN");
  app.add_option("--dmax", d_max, "last relaxation degree")->envname("CRITSOS_DMAX");
  app.add_option("--tol-feas", tol_feas, "solver feasibility tolerance")->envname("CRITSOS_TOL_FEAS");
  app.add_option("--tol-gap", tol_gap, "solver relative gap tolerance")->envname("CRITSOS_TOL_GAP");
  app.add_option("--tol-eig", tol_eig, "solver eigenvalue tolerance")->envname("CRITSOS_TOL_EIG");
  app.add_option("--max-iter", max_iter, "solver iteration limit")->envname("CRITSOS_MAX_ITER");
  app.add_option("--tol-conv", tol_conv, "stabilization tolerance on successive bounds")
      ->envname("CRITSOS_TOL_CONV");
  app.add_option("--tol-eig-cut", tol_eig_cut, "Gram eigenvalue cutoff for certificates")
      ->envname("CRITSOS_TOL_EIG_CUT");
  app.add_option("--tol-verify", tol_verify, "certificate verification tolerance")
      ->envname("CRITSOS_TOL_VERIFY");
  app.add_option("--tol-act", bhc_tols.act_tol, "BHC active-set tolerance")->envname("CRITSOS_TOL_ACT");
  app.add_option("--tol-rank", bhc_tols.rank_tol, "BHC rank tolerance")->envname("CRITSOS_TOL_RANK");
  app.add_option("--tol-res", bhc_tols.res_tol, "BHC multiplier residual tolerance")
      ->envname("CRITSOS_TOL_RES");
  app.add_option("--tol-pos", bhc_tols.pos_tol, "BHC multiplier positivity tolerance")
      ->envname("CRITSOS_TOL_POS");
  app.add_option("--tol-pd", bhc_tols.pd_tol, "BHC reduced Hessian tolerance")->envname("CRITSOS_TOL_PD");
  app.add_option("--tol-zero", bhc_tols.zero_tol, "BHC tolerance on f(x) - level")
      ->envname("CRITSOS_TOL_ZERO");
  app.add_option("--export-sdpa", export_dir, "write one SDPA file per level into DIR")
      ->envname("CRITSOS_EXPORT_SDPA");
  app.add_option("--certificate", cert_path, "write the last verified certificate to PATH")
      ->envname("CRITSOS_CERTIFICATE");
  app.add_option("--trace-penalty", trace_penalties,
                 "trace penalties tried in order, e.g. 0,1e-8,1e-7")
      ->delimiter(',')->envname("CRITSOS_TRACE_PENALTY");
  app.add_option("--check-bhc", bhc_points, "check BHC at \"x1,...,xn\" (repeatable)");
  app.add_option("--format", format, "table or structured")
      ->check(CLI::IsMember({"table", "structured"}))->envname("CRITSOS_FORMAT");
  app.add_option("--simd", simd, "kernel set: auto, scalar or avx2")->envname("CRITSOS_SIMD");
  app.add_flag("--no-early-stop", no_early_stop, "solve every level even after stabilization");
  app.add_flag("-v,--verbose", verbosity, "solver progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (!simd.empty() && !simd::select_kernels(simd)) {
      std::cerr << "error: kernel set '" << simd << "' is not available\n";
      return 1;
    }
    cli::ProblemFile file = cli::load_problem(path);
    cli::HierarchySettings settings;
    cli::apply_options(file.options, settings);
    if (mode) settings.mode = critical::parse_ideal_mode(*mode);
    if (d_min) settings.d_min = *d_min;
    if (d_max) settings.d_max = *d_max;
    if (tol_feas) settings.solver.feas_tol = *tol_feas;
    if (tol_gap) settings.solver.gap_tol = *tol_gap;
    if (tol_eig) settings.solver.eig_tol = *tol_eig;
    if (max_iter) settings.solver.max_iterations = *max_iter;
    if (tol_conv) settings.conv_tol = *tol_conv;
    if (tol_eig_cut) settings.eig_cut = *tol_eig_cut;
    if (tol_verify) settings.verify_tol = *tol_verify;
    settings.solver.verbosity = verbosity;
    if (!trace_penalties.empty()) settings.trace_penalties = trace_penalties;
    settings.export_sdpa_dir = export_dir;
    settings.stop_on_stabilization = !no_early_stop;
    if (d_min && !d_max && (!settings.d_max || *settings.d_max < *d_min)) {
      settings.d_max = *d_min + 4;
    }

    std::vector<std::vector<double>> points = file.minimizers;
    for (const auto& text : bhc_points) {
      auto p = cli::parse_point(text);
      if (p.size() != file.problem.nvars()) {
        std::cerr << "error: --check-bhc point has " << p.size() << " coordinates, expected "
                  << file.problem.nvars() << "\n";
        return 1;
      }
      points.push_back(std::move(p));
    }

    const cli::HierarchyResult result = cli::run_hierarchy(file.problem, settings);

    // BHC is stated at zeros of f - f(x*), so each point is checked at its own level.
    std::vector<certify::BhcReport> bhc;
    for (const auto& p : points) {
      certify::BhcTolerances t = bhc_tols;
      t.level = poly::evaluate(file.problem.objective, std::span<const double>(p));
      bhc.push_back(certify::check_bhc(file.problem, p, t));
    }

    if (!cert_path.empty()) {
      const cli::HierarchyRow* chosen = nullptr;
      for (const auto& row : result.rows) {
        if (row.certificate && row.verification && row.verification->passed) chosen = &row;
      }
      if (chosen == nullptr) {
        std::cerr << "warning: no verified certificate to write\n";
      } else {
        std::ofstream out(cert_path);
        out << certify::serialize_certificate(*chosen->certificate, file.problem.vars);
        if (!out) {
          std::cerr << "error: cannot write " << cert_path << "\n";
          return 1;
        }
      }
    }

    std::cout << cli::report(file.problem, result, cli::parse_report_format(format), bhc);
    return cli::exit_code(result);
  } catch (const cli::ProblemFileError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
