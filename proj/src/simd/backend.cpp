#include "icemest/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace icemest::simd {

namespace detail {
extern const Kernels kScalarTable;
#if defined(ICEMEST_WITH_AVX2)
extern const Kernels kAvx2Table;
#endif
}  // namespace detail

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(ICEMEST_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels& table(Backend b) {
#if defined(ICEMEST_WITH_AVX2)
  if (b == Backend::avx2) return detail::kAvx2Table;
#endif
  (void)b;
  return detail::kScalarTable;
}

namespace {

Backend pick_default() {
  if (const char* env = std::getenv("ICEMEST_BACKEND")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::avx2)) {
      return Backend::avx2;
    }
  }
  return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

struct State {
  std::atomic<const Kernels*> active;
  std::atomic<Backend> which;
  State() {
    const Backend b = pick_default();
    active.store(&table(b), std::memory_order_relaxed);
    which.store(b, std::memory_order_relaxed);
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

Backend active_backend() {
  return state().which.load(std::memory_order_relaxed);
}

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument("backend unavailable on this host: " +
                                backend_name(b));
  }
  state().which.store(b, std::memory_order_relaxed);
  state().active.store(&table(b), std::memory_order_relaxed);
}

const Kernels& active() {
  return *state().active.load(std::memory_order_relaxed);
}

}  // namespace icemest::simd
