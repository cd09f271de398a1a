#include <cmath>

#include "kernels_internal.hpp"

namespace kge::simd::detail {

double dot_scalar(const float* a, const float* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += double(a[i]) * double(b[i]);
  return s;
}

double dot3_scalar(const float* a, const float* b, const float* c, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += double(a[i]) * double(b[i]) * double(c[i]);
  return s;
}

double l1_translate_scalar(const float* h, const float* r, const float* t, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(double(h[i]) + double(r[i]) - double(t[i]));
  return s;
}

double l2sq_translate_scalar(const float* h, const float* r, const float* t, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = double(h[i]) + double(r[i]) - double(t[i]);
    s += e * e;
  }
  return s;
}

double dot_f64_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_f64_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace kge::simd::detail
