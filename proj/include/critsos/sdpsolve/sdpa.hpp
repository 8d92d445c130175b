#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "critsos/sdpsolve/sdp_problem.hpp"

namespace critsos {
namespace sdp {

/// One nonzero of F_matrix in the SDPA sparse format; indices are 1-based and
/// row <= col as written in the file. matrix 0 is the objective matrix F_0.
struct SdpaEntry {
  int matrix = 0;
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;

  bool operator==(const SdpaEntry&) const = default;
};

/// Contents of a .dat-s file. Semantics (dual form):
///   maximize tr(F_0 Y)  s.t.  tr(F_i Y) = c_i,  Y block-diagonal PSD.
/// A negative block size denotes a diagonal block.
struct SdpaModel {
  std::vector<std::string> comments;  // header lines without the marker
  int num_constraints = 0;
  std::vector<int> block_sizes;
  std::vector<double> c;
  std::vector<SdpaEntry> entries;  // sorted by (matrix, block, row, col)

  bool operator==(const SdpaModel&) const = default;
};

class SdpaError : public std::runtime_error {
 public:
  SdpaError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// PSD blocks map to SDPA blocks in order. Free variables w = w+ - w- go in a
/// trailing diagonal block of size 2 * nfree, with w+ first.
SdpaModel to_sdpa_model(const SdpProblem& problem);

/// Inverse of to_sdpa_model. Labels are restored from the comment header when
/// it is present.
SdpProblem from_sdpa_model(const SdpaModel& model);

/// Byte-deterministic text; values are printed with 17 significant digits.
std::string write_sdpa(const SdpaModel& model);
SdpaModel read_sdpa(std::string_view text);

inline std::string export_sdpa(const SdpProblem& problem) {
  return write_sdpa(to_sdpa_model(problem));
}

}  // namespace sdp
}  // namespace critsos
