#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "critsos/critical/critical.hpp"

namespace critsos {
namespace cli {

/// Error in a problem file. line and column are 1-based; column is 0 when the
/// problem is not tied to a position (missing keys, IO).
class ProblemFileError : public std::runtime_error {
 public:
  ProblemFileError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Options a problem file may carry. Unset fields fall back to the defaults
/// of the hierarchy driver, and command-line flags override both.
struct ProblemOptions {
  std::optional<critical::IdealMode> mode;
  std::optional<int> d_min;
  std::optional<int> d_max;
  std::optional<double> tol_feas;
  std::optional<double> tol_gap;
  std::optional<double> tol_eig;
  std::optional<int> max_iter;
  std::optional<double> tol_conv;
  std::optional<double> tol_eig_cut;
  std::optional<double> tol_verify;
};

/// File layout, one `key: value` per line, `#` starts a comment:
///
///   vars: x, y, z
///   objective: x
///   constraint: x - y^2 - z^2     # repeatable, each means g >= 0
///   mode: critical                # or gradient
///   dmin: 1
///   dmax: 3
///   tol-feas: 1e-8                # also tol-gap, tol-eig, max-iter,
///                                 # tol-conv, tol-eig-cut, tol-verify
///   minimizer: 0, 0, 0            # repeatable, checked for BHC
struct ProblemFile {
  Problem problem;
  ProblemOptions options;
  std::vector<std::vector<double>> minimizers;
};

ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem(const std::string& path);

/// "1, 2.5, -3" into doubles; throws std::invalid_argument.
std::vector<double> parse_point(std::string_view text);

}  // namespace cli
}  // namespace critsos
