// AVX2+FMA variants of the kernel table.  Compiled with -mavx2 -mfma when the
// toolchain supports it; the dispatcher only installs this table after a cpu
// feature check, so the rest of the binary never executes these instructions
// on unsupported hardware.

#include "icemest/simd/kernels.hpp"

#if defined(ICEMEST_WITH_AVX2) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "scalar_impl.hpp"

namespace icemest::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void v_fill(double* x, double value, std::size_t n) {
  const __m256d v = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, v);
  for (; i < n; ++i) x[i] = value;
}

double v_sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double v_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double v_wdot(const double* w, const double* x, const double* y,
              std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wx =
        _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(wx, _mm256_loadu_pd(y + i), acc);
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += w[i] * x[i] * y[i];
  return out;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void v_mul(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void v_residual(const double* target, const double* fitted, const double* mask,
                double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(target + i),
                                    _mm256_loadu_pd(fitted + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(d, _mm256_loadu_pd(mask + i)));
  }
  for (; i < n; ++i) out[i] = (target[i] - fitted[i]) * mask[i];
}

void v_logit_weight(const double* p, const double* mask, double* out,
                    std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vp = _mm256_loadu_pd(p + i);
    const __m256d w = _mm256_mul_pd(vp, _mm256_sub_pd(one, vp));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(w, _mm256_loadu_pd(mask + i)));
  }
  for (; i < n; ++i) out[i] = mask[i] * p[i] * (1.0 - p[i]);
}

// exp(x) for four lanes.  Range reduction x = n*ln2 + r with |r| <= ln2/2,
// degree-13 Taylor polynomial for exp(r), 2^n applied through the exponent
// bits.  Inputs clamped to [-708, 708]; NaN propagates.
inline __m256d exp_pd(__m256d x) {
  const __m256d clamp_hi = _mm256_set1_pd(708.0);
  const __m256d clamp_lo = _mm256_set1_pd(-708.0);
  // Constant-first operand order makes min/max keep NaN lanes intact.
  x = _mm256_min_pd(clamp_hi, _mm256_max_pd(clamp_lo, x));

  const __m256d inv_ln2 = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, inv_ln2),
                                    _MM_FROUND_TO_NEAREST_INT |
                                        _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^n via integer exponent bits; n is integral in [-1022, 1022] here, so
  // the add-magic trick recovers it exactly as a 64-bit integer per lane.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  const __m256i ni = _mm256_sub_epi64(
      _mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
  const __m256i expo = _mm256_slli_epi64(
      _mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(expo));
}

void v_expit(const double* x, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d absmask = _mm256_castsi256_pd(
      _mm256_set1_epi64x(static_cast<std::int64_t>(0x7fffffffffffffffULL)));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d ax = _mm256_and_pd(vx, absmask);
    const __m256d t = exp_pd(_mm256_sub_pd(zero, ax));
    const __m256d denom = _mm256_add_pd(one, t);
    const __m256d lo = _mm256_div_pd(t, denom);    // expit(-|x|)
    const __m256d hi = _mm256_div_pd(one, denom);  // expit(+|x|)
    const __m256d nonneg = _mm256_cmp_pd(vx, zero, _CMP_GE_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(lo, hi, nonneg));
  }
  for (; i < n; ++i) out[i] = detail::sk_expit(x[i]);
}

}  // namespace

namespace detail {

extern const Kernels kAvx2Table;
const Kernels kAvx2Table = {
    &v_fill, &v_sum,      &v_dot,          &v_wdot,  &v_axpy,
    &v_mul,  &v_residual, &v_logit_weight, &v_expit,
};

}  // namespace detail
}  // namespace icemest::simd

#endif  // ICEMEST_WITH_AVX2 && __AVX2__ && __FMA__
