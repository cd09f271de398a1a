#pragma once

#include <cstddef>

// Inner-loop arithmetic used by scoring, gradients and the RGCN encoder.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once at runtime from CPUID and can
// be overridden (tests, --scalar flag). Float inputs are widened and
// accumulated in double in both variants; results differ only by summation
// order.

namespace kge::simd {

enum class Level { kScalar, kAvx2 };

struct Kernels {
  Level level;
  // sum_i a[i] * b[i]
  double (*dot)(const float* a, const float* b, std::size_t n);
  // sum_i a[i] * b[i] * c[i]
  double (*dot3)(const float* a, const float* b, const float* c, std::size_t n);
  // sum_i |h[i] + r[i] - t[i]|
  double (*l1_translate)(const float* h, const float* r, const float* t, std::size_t n);
  // sum_i (h[i] + r[i] - t[i])^2
  double (*l2sq_translate)(const float* h, const float* r, const float* t, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
};

const Kernels& scalar_kernels();

// nullptr when the build or the CPU lacks AVX2+FMA.
const Kernels* avx2_kernels();

bool cpu_supports_avx2();

// Active kernel set; defaults to the widest supported level.
const Kernels& kernels();

Level active_level();

// Returns false (and leaves the level unchanged) if `level` is unavailable.
bool set_level(Level level);

const char* level_name(Level level);

}  // namespace kge::simd
