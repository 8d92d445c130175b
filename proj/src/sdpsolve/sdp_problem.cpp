#include "critsos/sdpsolve/sdp_problem.hpp"

#include <cmath>
#include <stdexcept>

namespace critsos {
namespace sdp {

std::size_t SdpProblem::total_psd_dim() const {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.dim;
  return total;
}

void SdpProblem::validate() const {
  if (objective.size() != free_vars.size()) {
    throw std::invalid_argument("objective length does not match free vars");
  }
  for (const auto& b : blocks) {
    if (b.dim == 0) throw std::invalid_argument("empty PSD block " + b.label);
  }
  for (const auto& e : block_objective) {
    if (e.block >= blocks.size() || e.row > e.col || e.col >= blocks[e.block].dim ||
        !std::isfinite(e.value)) {
      throw std::invalid_argument("invalid block objective entry");
    }
  }
  for (const auto& eq : equalities) {
    for (const auto& e : eq.block_entries) {
      if (e.block >= blocks.size()) {
        throw std::invalid_argument("equality " + eq.label +
                                    " references a missing block");
      }
      if (e.row > e.col || e.col >= blocks[e.block].dim) {
        throw std::invalid_argument("equality " + eq.label +
                                    " has an invalid block entry");
      }
      if (!std::isfinite(e.value)) {
        throw std::invalid_argument("non-finite coefficient in " + eq.label);
      }
    }
    for (const auto& f : eq.free_entries) {
      if (f.var >= free_vars.size()) {
        throw std::invalid_argument("equality " + eq.label +
                                    " references a missing free variable");
      }
    }
    if (!std::isfinite(eq.rhs)) {
      throw std::invalid_argument("non-finite right-hand side in " + eq.label);
    }
  }
}

}  // namespace sdp
}  // namespace critsos
