#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <string>

namespace icemest::simd {

enum class Backend { scalar, avx2 };

std::string backend_name(Backend b);

// Flat table of the hot loops used by the estimating-equation code.  All
// arrays are unit-length-n and contiguous; masks hold exactly 0.0 or 1.0.
struct Kernels {
  void (*fill)(double* x, double value, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i w[i]*x[i]*y[i]
  double (*wdot)(const double* w, const double* x, const double* y,
                 std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
  // out = (target - fitted) * mask
  void (*residual)(const double* target, const double* fitted,
                   const double* mask, double* out, std::size_t n);
  // out = mask * p * (1 - p); the IRLS working weight
  void (*logit_weight)(const double* p, const double* mask, double* out,
                       std::size_t n);
  // out = 1 / (1 + exp(-x)), overflow-safe for any finite input
  void (*expit)(const double* x, double* out, std::size_t n);
};

const Kernels& table(Backend b);
bool backend_supported(Backend b);

Backend active_backend();
// Throws std::invalid_argument if the backend is unavailable on this host.
// Intended for tests and the ICEMEST_BACKEND environment override; not
// thread-safe against concurrent kernel calls.
void set_backend(Backend b);

const Kernels& active();

// Convenience wrappers over the active table.
inline void fill(std::span<double> x, double value) {
  active().fill(x.data(), value, x.size());
}
inline double sum(std::span<const double> x) {
  return active().sum(x.data(), x.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}
inline double wdot(std::span<const double> w, std::span<const double> x,
                   std::span<const double> y) {
  assert(w.size() == x.size() && x.size() == y.size());
  return active().wdot(w.data(), x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void mul(std::span<const double> x, std::span<const double> y,
                std::span<double> out) {
  assert(x.size() == y.size() && y.size() == out.size());
  active().mul(x.data(), y.data(), out.data(), x.size());
}
inline void residual(std::span<const double> target,
                     std::span<const double> fitted,
                     std::span<const double> mask, std::span<double> out) {
  assert(target.size() == out.size());
  active().residual(target.data(), fitted.data(), mask.data(), out.data(),
                    target.size());
}
inline void logit_weight(std::span<const double> p,
                         std::span<const double> mask, std::span<double> out) {
  assert(p.size() == out.size());
  active().logit_weight(p.data(), mask.data(), out.data(), p.size());
}
inline void expit(std::span<const double> x, std::span<double> out) {
  assert(x.size() == out.size());
  active().expit(x.data(), out.data(), x.size());
}

// Scalar overflow-safe expit, shared by both backends' tail handling and
// usable directly for single values.
double expit1(double x);

}  // namespace icemest::simd
