#include "kge/simd/kernels.hpp"

#include <atomic>

#include "kernels_internal.hpp"

namespace kge::simd {
namespace {

const Kernels kScalar{
    Level::kScalar,
    detail::dot_scalar,
    detail::dot3_scalar,
    detail::l1_translate_scalar,
    detail::l2sq_translate_scalar,
    detail::dot_f64_scalar,
    detail::axpy_f64_scalar,
};

#if defined(KGE_HAVE_AVX2)
const Kernels kAvx2{
    Level::kAvx2,
    detail::dot_avx2,
    detail::dot3_avx2,
    detail::l1_translate_avx2,
    detail::l2sq_translate_avx2,
    detail::dot_f64_avx2,
    detail::axpy_f64_avx2,
};
#endif

const Kernels* detect() {
  if (const Kernels* k = avx2_kernels()) return k;
  return &kScalar;
}

std::atomic<const Kernels*>& active() {
  static std::atomic<const Kernels*> ptr{detect()};
  return ptr;
}

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

bool cpu_supports_avx2() {
#if defined(KGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* avx2_kernels() {
#if defined(KGE_HAVE_AVX2)
  if (cpu_supports_avx2()) return &kAvx2;
#endif
  return nullptr;
}

const Kernels& kernels() { return *active().load(std::memory_order_relaxed); }

Level active_level() { return kernels().level; }

bool set_level(Level level) {
  if (level == Level::kScalar) {
    active().store(&kScalar);
    return true;
  }
  if (const Kernels* k = avx2_kernels()) {
    active().store(k);
    return true;
  }
  return false;
}

const char* level_name(Level level) {
  switch (level) {
    case Level::kScalar:
      return "scalar";
    case Level::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace kge::simd
