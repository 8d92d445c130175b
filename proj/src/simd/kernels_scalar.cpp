#include "critsos/simd/kernels.hpp"

namespace critsos {
namespace simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, double alpha,
                 const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = alpha * b[p + j * ldb];
      if (s == 0.0) continue;
      axpy_scalar(s, a + p * lda, cj, m);
    }
  }
}

void ger_scalar(std::size_t m, std::size_t n, double alpha, const double* x,
                const double* y, double* a, std::size_t lda) {
  for (std::size_t j = 0; j < n; ++j) {
    const double s = alpha * y[j];
    if (s == 0.0) continue;
    axpy_scalar(s, x, a + j * lda, m);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar,
                                 gemm_scalar, ger_scalar};
  return table;
}

}  // namespace simd
}  // namespace critsos
