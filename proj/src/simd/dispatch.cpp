#include <atomic>
#include <cstdlib>
#include <string>

#include "critsos/simd/kernels.hpp"

namespace critsos {
namespace simd {

bool cpu_supports_avx2() {
#if defined(CRITSOS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported;
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() {
#if defined(CRITSOS_HAVE_AVX2)
  if (cpu_supports_avx2()) return &detail::avx2_table();
#endif
  return nullptr;
}

namespace {

const KernelTable* resolve(const std::string& request) {
  if (request == "scalar") return &scalar_kernels();
  if (request == "avx2") return avx2_kernels();
  if (request == "auto" || request.empty()) {
    const KernelTable* wide = avx2_kernels();
    return wide != nullptr ? wide : &scalar_kernels();
  }
  return nullptr;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> active{[] {
    const char* env = std::getenv("CRITSOS_SIMD");
    const KernelTable* chosen = resolve(env != nullptr ? env : "auto");
    return chosen != nullptr ? chosen : resolve("auto");
  }()};
  return active;
}

}  // namespace

const KernelTable& active_kernels() { return *slot().load(); }

bool select_kernels(const std::string& request) {
  const KernelTable* chosen = resolve(request);
  if (chosen == nullptr) return false;
  slot().store(chosen);
  return true;
}

}  // namespace simd
}  // namespace critsos
