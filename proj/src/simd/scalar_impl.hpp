#pragma once

// Reference implementations of the kernel table.  The AVX2 translation unit
// includes this header for tail handling, so everything stays inline.

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace icemest::simd::detail {

inline void sk_fill(double* x, double value, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = value;
}

inline double sk_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

inline double sk_dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

inline double sk_wdot(const double* w, const double* x, const double* y,
                      std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * y[i];
  return acc;
}

inline void sk_axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline void sk_mul(const double* x, const double* y, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

inline void sk_residual(const double* target, const double* fitted,
                        const double* mask, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (target[i] - fitted[i]) * mask[i];
}

inline void sk_logit_weight(const double* p, const double* mask, double* out,
                            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = mask[i] * p[i] * (1.0 - p[i]);
}

// Inputs are clamped to |x| <= 708 before exponentiating so the result is
// free of overflow for any finite argument; NaN propagates (std::min keeps
// the NaN where fmin would discard it).
inline double sk_expit(double x) {
  const double ax = std::min(std::fabs(x), 708.0);
  const double t = std::exp(-ax);
  return x >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
}

inline void sk_expit_n(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = sk_expit(x[i]);
}

}  // namespace icemest::simd::detail
