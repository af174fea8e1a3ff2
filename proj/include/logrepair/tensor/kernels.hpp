#pragma once

// Dense double-precision kernels behind the tensor engine. Every kernel has
// a portable scalar reference and, on x86-64, an AVX2+FMA variant picked at
// runtime. All matrices are row-major with explicit leading dimensions.

#include <cstddef>
#include <string_view>

namespace logrepair::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b);

struct KernelTable {
  // C[n x m] += A[n x k] * B[k x m]
  void (*gemm_nn_acc)(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda,
                      const double* b, std::size_t ldb, double* c, std::size_t ldc);
  // C[k x m] += A[n x k]^T * B[n x m]
  void (*gemm_tn_acc)(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda,
                      const double* b, std::size_t ldb, double* c, std::size_t ldc);
  // C[n x m] += A[n x k] * B[m x k]^T
  void (*gemm_nt_acc)(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda,
                      const double* b, std::size_t ldb, double* c, std::size_t ldc);
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  double (*dot)(std::size_t n, const double* x, const double* y);
};

const KernelTable& scalar_table();
/// nullptr when the binary or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

bool backend_available(Backend b);

/// Kernels used by the tensor engine. Defaults to the fastest available
/// backend; the LOGREPAIR_KERNELS=scalar environment variable or
/// force_backend() override it.
const KernelTable& active();
Backend active_backend();

/// Returns false (and changes nothing) if the backend is unavailable.
bool force_backend(Backend b);

}  // namespace logrepair::kernels
