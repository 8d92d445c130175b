#pragma once

#include <cstddef>
#include <span>
#include <string>

// Dense double-precision kernels behind the interior-point solver. Every
// kernel has a portable scalar reference and, where the build and the CPU
// allow it, an AVX2+FMA variant. The active table is picked once at first use
// and can be forced with CRITSOS_SIMD=scalar|avx2|auto.

namespace critsos {
namespace simd {

struct KernelTable {
  const char* name;

  double (*dot)(const double* x, const double* y, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // Column-major C(m x n) += alpha * A(m x k) * B(k x n).
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, double alpha,
               const double* a, std::size_t lda, const double* b,
               std::size_t ldb, double* c, std::size_t ldc);

  // Column-major A(m x n) += alpha * x * y^T.
  void (*ger)(std::size_t m, std::size_t n, double alpha, const double* x,
              const double* y, double* a, std::size_t lda);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks
/// AVX2/FMA.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

/// The table used by the solver.
const KernelTable& active_kernels();

/// Re-selects the active table ("scalar", "avx2" or "auto"). Returns false and
/// leaves the selection unchanged when the request cannot be honoured.
bool select_kernels(const std::string& request);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active_kernels().dot(x.data(), y.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
#if defined(CRITSOS_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace simd
}  // namespace critsos
