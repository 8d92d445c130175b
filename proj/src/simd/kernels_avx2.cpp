// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "critsos/simd/kernels.hpp"

namespace critsos {
namespace simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i + 4),
                                     _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Four output columns at a time share each load of A's column.
void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, double alpha,
               const double* a, std::size_t lda, const double* b,
               std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    double* c0 = c + j * ldc;
    double* c1 = c0 + ldc;
    double* c2 = c1 + ldc;
    double* c3 = c2 + ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const double* ap = a + p * lda;
      const double s0 = alpha * b[p + j * ldb];
      const double s1 = alpha * b[p + (j + 1) * ldb];
      const double s2 = alpha * b[p + (j + 2) * ldb];
      const double s3 = alpha * b[p + (j + 3) * ldb];
      const __m256d v0 = _mm256_set1_pd(s0);
      const __m256d v1 = _mm256_set1_pd(s1);
      const __m256d v2 = _mm256_set1_pd(s2);
      const __m256d v3 = _mm256_set1_pd(s3);
      std::size_t i = 0;
      for (; i + 4 <= m; i += 4) {
        const __m256d av = _mm256_loadu_pd(ap + i);
        _mm256_storeu_pd(c0 + i, _mm256_fmadd_pd(v0, av, _mm256_loadu_pd(c0 + i)));
        _mm256_storeu_pd(c1 + i, _mm256_fmadd_pd(v1, av, _mm256_loadu_pd(c1 + i)));
        _mm256_storeu_pd(c2 + i, _mm256_fmadd_pd(v2, av, _mm256_loadu_pd(c2 + i)));
        _mm256_storeu_pd(c3 + i, _mm256_fmadd_pd(v3, av, _mm256_loadu_pd(c3 + i)));
      }
      for (; i < m; ++i) {
        c0[i] += s0 * ap[i];
        c1[i] += s1 * ap[i];
        c2[i] += s2 * ap[i];
        c3[i] += s3 * ap[i];
      }
    }
  }
  for (; j < n; ++j) {
    double* cj = c + j * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = alpha * b[p + j * ldb];
      if (s != 0.0) axpy_avx2(s, a + p * lda, cj, m);
    }
  }
}

void ger_avx2(std::size_t m, std::size_t n, double alpha, const double* x,
              const double* y, double* a, std::size_t lda) {
  for (std::size_t j = 0; j < n; ++j) {
    const double s = alpha * y[j];
    if (s != 0.0) axpy_avx2(s, x, a + j * lda, m);
  }
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, gemm_avx2,
                                 ger_avx2};
  return table;
}

}  // namespace detail
}  // namespace simd
}  // namespace critsos
