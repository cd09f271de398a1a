#pragma once

#include "kge/simd/kernels.hpp"

namespace kge::simd::detail {

double dot_scalar(const float* a, const float* b, std::size_t n);
double dot3_scalar(const float* a, const float* b, const float* c, std::size_t n);
double l1_translate_scalar(const float* h, const float* r, const float* t, std::size_t n);
double l2sq_translate_scalar(const float* h, const float* r, const float* t, std::size_t n);
double dot_f64_scalar(const double* a, const double* b, std::size_t n);
void axpy_f64_scalar(double alpha, const double* x, double* y, std::size_t n);

#if defined(KGE_HAVE_AVX2)
double dot_avx2(const float* a, const float* b, std::size_t n);
double dot3_avx2(const float* a, const float* b, const float* c, std::size_t n);
double l1_translate_avx2(const float* h, const float* r, const float* t, std::size_t n);
double l2sq_translate_avx2(const float* h, const float* r, const float* t, std::size_t n);
double dot_f64_avx2(const double* a, const double* b, std::size_t n);
void axpy_f64_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif

}  // namespace kge::simd::detail
