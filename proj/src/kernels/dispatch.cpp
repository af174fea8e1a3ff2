#include <atomic>
#include <cstdlib>
#include <string_view>

#include "logrepair/tensor/kernels.hpp"

namespace logrepair::kernels {

const KernelTable* avx2_compiled_table();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("LOGREPAIR_KERNELS"); env && std::string_view(env) == "scalar") {
    return Backend::Scalar;
  }
  return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

const KernelTable* avx2_table() {
  static const KernelTable* table = cpu_has_avx2() ? avx2_compiled_table() : nullptr;
  return table;
}

bool backend_available(Backend b) { return b == Backend::Scalar || avx2_table() != nullptr; }

const KernelTable& active() {
  return current().load(std::memory_order_relaxed) == Backend::Avx2 ? *avx2_table() : scalar_table();
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

bool force_backend(Backend b) {
  if (!backend_available(b)) return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

}  // namespace logrepair::kernels
