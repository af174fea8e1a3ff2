#include "logrepair/tensor/kernels.hpp"

namespace logrepair::kernels {
namespace {

void gemm_nn_acc(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = c + i * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * lda + p];
      const double* brow = b + p * ldb;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_tn_acc(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t r = 0; r < n; ++r) {
    const double* brow = b + r * ldb;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[r * lda + p];
      double* crow = c + p * ldc;
      for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt_acc(std::size_t n, std::size_t k, std::size_t m, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * lda + p] * b[j * ldb + p];
      c[i * ldc + j] += s;
    }
  }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{gemm_nn_acc, gemm_tn_acc, gemm_nt_acc, axpy, dot};
  return table;
}

}  // namespace logrepair::kernels
