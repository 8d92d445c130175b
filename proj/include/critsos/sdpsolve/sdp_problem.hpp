#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace critsos {
namespace sdp {

struct PsdBlock {
  std::string label;
  std::size_t dim = 0;
};

/// Coefficient of a symmetric block entry. row <= col; an off-diagonal entry
/// stands for both (row, col) and (col, row), so <A, X> picks up 2 * v * X_rc.
struct BlockEntry {
  std::size_t block = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

struct FreeEntry {
  std::size_t var = 0;
  double value = 0.0;
};

/// sum_k <A_k, X_k> + sum_j b_j w_j = rhs
struct Equality {
  std::string label;
  std::vector<BlockEntry> block_entries;
  std::vector<FreeEntry> free_entries;
  double rhs = 0.0;
};

/// maximize objective . w + <C, X>
/// s.t.     one Equality per row, X_k PSD, w free.
struct SdpProblem {
  std::vector<PsdBlock> blocks;
  std::vector<std::string> free_vars;
  std::vector<double> objective;  // one per free variable
  std::vector<BlockEntry> block_objective;  // C, usually empty
  std::vector<Equality> equalities;

  std::size_t total_psd_dim() const;
  /// Throws std::invalid_argument on out-of-range indices, lower-triangle
  /// entries, or an objective of the wrong length.
  void validate() const;
};

}  // namespace sdp
}  // namespace critsos
