// Compiled with -mavx2 -mfma on x86-64 only; the dispatcher never calls into
// this file unless the CPU reports both features.
#include "logrepair/tensor/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace logrepair::kernels {
namespace {

// C[i, j] += sum_p A(i, p) * B[p, j] where A(i, p) = a[i * ars + p * acs].
// Register block of 4 rows x 8 columns, then narrower tails.
void gemm_strided(std::size_t rows, std::size_t inner, std::size_t m, const double* a, std::size_t ars,
                  std::size_t acs, const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    double* c0 = c + i * ldc;
    double* c1 = c0 + ldc;
    double* c2 = c1 + ldc;
    double* c3 = c2 + ldc;
    const double* a0 = a + i * ars;
    std::size_t j = 0;
    for (; j + 8 <= m; j += 8) {
      __m256d r00 = _mm256_loadu_pd(c0 + j), r01 = _mm256_loadu_pd(c0 + j + 4);
      __m256d r10 = _mm256_loadu_pd(c1 + j), r11 = _mm256_loadu_pd(c1 + j + 4);
      __m256d r20 = _mm256_loadu_pd(c2 + j), r21 = _mm256_loadu_pd(c2 + j + 4);
      __m256d r30 = _mm256_loadu_pd(c3 + j), r31 = _mm256_loadu_pd(c3 + j + 4);
      for (std::size_t p = 0; p < inner; ++p) {
        const double* brow = b + p * ldb + j;
        const __m256d b0 = _mm256_loadu_pd(brow);
        const __m256d b1 = _mm256_loadu_pd(brow + 4);
        const double* ap = a0 + p * acs;
        __m256d av = _mm256_broadcast_sd(ap);
        r00 = _mm256_fmadd_pd(av, b0, r00);
        r01 = _mm256_fmadd_pd(av, b1, r01);
        av = _mm256_broadcast_sd(ap + ars);
        r10 = _mm256_fmadd_pd(av, b0, r10);
        r11 = _mm256_fmadd_pd(av, b1, r11);
        av = _mm256_broadcast_sd(ap + 2 * ars);
        r20 = _mm256_fmadd_pd(av, b0, r20);
        r21 = _mm256_fmadd_pd(av, b1, r21);
        av = _mm256_broadcast_sd(ap + 3 * ars);
        r30 = _mm256_fmadd_pd(av, b0, r30);
        r31 = _mm256_fmadd_pd(av, b1, r31);
      }
      _mm256_storeu_pd(c0 + j, r00), _mm256_storeu_pd(c0 + j + 4, r01);
      _mm256_storeu_pd(c1 + j, r10), _mm256_storeu_pd(c1 + j + 4, r11);
      _mm256_storeu_pd(c2 + j, r20), _mm256_storeu_pd(c2 + j + 4, r21);
      _mm256_storeu_pd(c3 + j, r30), _mm256_storeu_pd(c3 + j + 4, r31);
    }
    for (; j + 4 <= m; j += 4) {
      __m256d r0 = _mm256_loadu_pd(c0 + j), r1 = _mm256_loadu_pd(c1 + j);
      __m256d r2 = _mm256_loadu_pd(c2 + j), r3 = _mm256_loadu_pd(c3 + j);
      for (std::size_t p = 0; p < inner; ++p) {
        const __m256d bv = _mm256_loadu_pd(b + p * ldb + j);
        const double* ap = a0 + p * acs;
        r0 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap), bv, r0);
        r1 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap + ars), bv, r1);
        r2 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap + 2 * ars), bv, r2);
        r3 = _mm256_fmadd_pd(_mm256_broadcast_sd(ap + 3 * ars), bv, r3);
      }
      _mm256_storeu_pd(c0 + j, r0), _mm256_storeu_pd(c1 + j, r1);
      _mm256_storeu_pd(c2 + j, r2), _mm256_storeu_pd(c3 + j, r3);
    }
    for (; j < m; ++j) {
      for (std::size_t q = 0; q < 4; ++q) {
        double s = c[(i + q) * ldc + j];
        for (std::size_t p = 0; p < inner; ++p) s += a0[q * ars + p * acs] * b[p * ldb + j];
        c[(i + q) * ldc + j] = s;
      }
    }
  }
  for (; i < rows; ++i) {
    double* crow = c + i * ldc;
    const double* arow = a + i * ars;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      __m256d r = _mm256_loadu_pd(crow + j);
      for (std::size_t p = 0; p < inner; ++p) {
        r = _mm256_fmadd_pd(_mm256_broadcast_sd(arow + p * acs), _mm256_loadu_pd(b + p * ldb + j), r);
      }
      _mm256_storeu_pd(crow + j, r);
    }
    for (; j < m; ++j) {
      double s = crow[j];
      for (std::size_t p = 0; p < inner; ++p) s += arow[p * acs] * b[p * ldb + j];
      crow[j] = s;
    }
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void gemm_nn_acc(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  gemm_strided(n, k, m, a, lda, 1, b, ldb, c, ldc);
}

void gemm_tn_acc(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  gemm_strided(k, n, m, a, 1, lda, b, ldb, c, ldc);
}

void gemm_nt_acc(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  const std::size_t kv = k / 4 * 4;
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * lda;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      const double* b0 = b + j * ldb;
      const double* b1 = b0 + ldb;
      const double* b2 = b1 + ldb;
      const double* b3 = b2 + ldb;
      __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < kv; p += 4) {
        const __m256d av = _mm256_loadu_pd(arow + p);
        s0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b0 + p), s0);
        s1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b1 + p), s1);
        s2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b2 + p), s2);
        s3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b3 + p), s3);
      }
      double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
      for (std::size_t p = kv; p < k; ++p) {
        t0 += arow[p] * b0[p];
        t1 += arow[p] * b1[p];
        t2 += arow[p] * b2[p];
        t3 += arow[p] * b3[p];
      }
      double* crow = c + i * ldc + j;
      crow[0] += t0;
      crow[1] += t1;
      crow[2] += t2;
      crow[3] += t3;
    }
    for (; j < m; ++j) {
      const double* brow = b + j * ldb;
      __m256d s = _mm256_setzero_pd();
      for (std::size_t p = 0; p < kv; p += 4) {
        s = _mm256_fmadd_pd(_mm256_loadu_pd(arow + p), _mm256_loadu_pd(brow + p), s);
      }
      double t = hsum(s);
      for (std::size_t p = kv; p < k; ++p) t += arow[p] * brow[p];
      c[i * ldc + j] += t;
    }
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  double t = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) t += x[i] * y[i];
  return t;
}

}  // namespace

const KernelTable* avx2_compiled_table() {
  static const KernelTable table{gemm_nn_acc, gemm_tn_acc, gemm_nt_acc, axpy, dot};
  return &table;
}

}  // namespace logrepair::kernels

#else

namespace logrepair::kernels {
const KernelTable* avx2_compiled_table() { return nullptr; }
}  // namespace logrepair::kernels

#endif
