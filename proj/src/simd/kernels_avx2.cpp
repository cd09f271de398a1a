// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "kernels_internal.hpp"

#if defined(KGE_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace kge::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Widen 4 floats starting at p.
inline __m256d load4(const float* p) { return _mm256_cvtps_pd(_mm_loadu_ps(p)); }

}  // namespace

double dot_avx2(const float* a, const float* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(load4(a + i), load4(b + i), acc0);
    acc1 = _mm256_fmadd_pd(load4(a + i + 4), load4(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(load4(a + i), load4(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += double(a[i]) * double(b[i]);
  return s;
}

double dot3_avx2(const float* a, const float* b, const float* c, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(load4(a + i), load4(b + i)), load4(c + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(load4(a + i + 4), load4(b + i + 4)), load4(c + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(load4(a + i), load4(b + i)), load4(c + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += double(a[i]) * double(b[i]) * double(c[i]);
  return s;
}

double l1_translate_avx2(const float* h, const float* r, const float* t, std::size_t n) {
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d e0 = _mm256_sub_pd(_mm256_add_pd(load4(h + i), load4(r + i)), load4(t + i));
    const __m256d e1 = _mm256_sub_pd(_mm256_add_pd(load4(h + i + 4), load4(r + i + 4)), load4(t + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_and_pd(absmask, e0));
    acc1 = _mm256_add_pd(acc1, _mm256_and_pd(absmask, e1));
  }
  if (i + 4 <= n) {
    const __m256d e0 = _mm256_sub_pd(_mm256_add_pd(load4(h + i), load4(r + i)), load4(t + i));
    acc0 = _mm256_add_pd(acc0, _mm256_and_pd(absmask, e0));
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += std::fabs(double(h[i]) + double(r[i]) - double(t[i]));
  return s;
}

double l2sq_translate_avx2(const float* h, const float* r, const float* t, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d e0 = _mm256_sub_pd(_mm256_add_pd(load4(h + i), load4(r + i)), load4(t + i));
    const __m256d e1 = _mm256_sub_pd(_mm256_add_pd(load4(h + i + 4), load4(r + i + 4)), load4(t + i + 4));
    acc0 = _mm256_fmadd_pd(e0, e0, acc0);
    acc1 = _mm256_fmadd_pd(e1, e1, acc1);
  }
  if (i + 4 <= n) {
    const __m256d e0 = _mm256_sub_pd(_mm256_add_pd(load4(h + i), load4(r + i)), load4(t + i));
    acc0 = _mm256_fmadd_pd(e0, e0, acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double e = double(h[i]) + double(r[i]) - double(t[i]);
    s += e * e;
  }
  return s;
}

double dot_f64_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_f64_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace kge::simd::detail

#endif  // KGE_HAVE_AVX2
