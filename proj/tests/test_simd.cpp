#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "icemest/simd/kernels.hpp"
#include "icemest/util/rng.hpp"

using namespace icemest::simd;

namespace {

// Restores whatever backend was active when the test started.
struct BackendGuard {
  Backend saved = active_backend();
  ~BackendGuard() { set_backend(saved); }
};

std::vector<double> random_vec(std::size_t n, std::uint64_t stream,
                               double lo = -3.0, double hi = 3.0) {
  icemest::util::Rng rng(2718, stream);
  std::vector<double> x(n);
  for (auto& v : x) v = lo + (hi - lo) * rng.uniform();
  return x;
}

std::vector<double> random_mask(std::size_t n, std::uint64_t stream) {
  icemest::util::Rng rng(3141, stream);
  std::vector<double> m(n);
  for (auto& v : m) v = rng.bernoulli(0.7) ? 1.0 : 0.0;
  return m;
}

const std::size_t kSizes[] = {0, 1, 3, 4, 7, 8, 31, 64, 1000};

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("reduction kernels match plain loops on every backend") {
  BackendGuard guard;
  for (Backend b : {Backend::scalar, Backend::avx2}) {
    if (!backend_supported(b)) continue;
    set_backend(b);
    CAPTURE(backend_name(b));
    for (std::size_t n : kSizes) {
      const auto x = random_vec(n, 1), y = random_vec(n, 2),
                 w = random_vec(n, 3, 0.0, 1.0);
      double ref_sum = 0.0, ref_dot = 0.0, ref_wdot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ref_sum += x[i];
        ref_dot += x[i] * y[i];
        ref_wdot += w[i] * x[i] * y[i];
      }
      CHECK(sum(x) == doctest::Approx(ref_sum).epsilon(1e-12));
      CHECK(dot(x, y) == doctest::Approx(ref_dot).epsilon(1e-12));
      CHECK(wdot(w, x, y) == doctest::Approx(ref_wdot).epsilon(1e-12));
    }
  }
}

TEST_CASE("elementwise kernels match plain loops on every backend") {
  BackendGuard guard;
  for (Backend b : {Backend::scalar, Backend::avx2}) {
    if (!backend_supported(b)) continue;
    set_backend(b);
    CAPTURE(backend_name(b));
    for (std::size_t n : kSizes) {
      const auto x = random_vec(n, 4), y = random_vec(n, 5);
      const auto p = random_vec(n, 6, 0.001, 0.999);
      const auto mask = random_mask(n, 7);

      std::vector<double> out(n), ref(n);

      fill(out, 2.5);
      for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == 2.5);

      mul(x, y, out);
      for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == x[i] * y[i]);

      std::vector<double> acc = y;
      axpy(1.75, x, acc);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(acc[i] == doctest::Approx(1.75 * x[i] + y[i]).epsilon(1e-15));
      }

      residual(x, p, mask, out);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(out[i] == doctest::Approx((x[i] - p[i]) * mask[i]));
      }

      logit_weight(p, mask, out);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(out[i] ==
              doctest::Approx(mask[i] * p[i] * (1.0 - p[i])).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("expit agrees across backends and with the closed form") {
  BackendGuard guard;
  std::vector<double> xs;
  for (double v = -40.0; v <= 40.0; v += 0.37) xs.push_back(v);
  xs.insert(xs.end(), {-800.0, -708.0, -37.0, 0.0, 36.0, 708.0, 800.0});

  std::vector<double> scalar_out(xs.size());
  set_backend(Backend::scalar);
  expit(xs, scalar_out);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double direct = 1.0 / (1.0 + std::exp(-xs[i]));
    CHECK(scalar_out[i] == doctest::Approx(direct).epsilon(1e-14));
    CHECK(scalar_out[i] == expit1(xs[i]));
  }

  if (backend_supported(Backend::avx2)) {
    std::vector<double> avx_out(xs.size());
    set_backend(Backend::avx2);
    expit(xs, avx_out);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(std::abs(avx_out[i] - scalar_out[i]) <= 1e-14);
    }
  }
}

TEST_CASE("expit saturates cleanly at the extremes") {
  BackendGuard guard;
  for (Backend b : {Backend::scalar, Backend::avx2}) {
    if (!backend_supported(b)) continue;
    set_backend(b);
    CAPTURE(backend_name(b));
    std::vector<double> x{800.0, -800.0, 0.0};
    std::vector<double> out(3);
    expit(x, out);
    CHECK(out[0] == 1.0);
    CHECK(out[1] > 0.0);
    CHECK(out[1] < 1e-300);
    CHECK(out[2] == 0.5);
  }
}

TEST_CASE("NaN propagates through expit instead of saturating") {
  BackendGuard guard;
  for (Backend b : {Backend::scalar, Backend::avx2}) {
    if (!backend_supported(b)) continue;
    set_backend(b);
    CAPTURE(backend_name(b));
    std::vector<double> x{0.0, std::numeric_limits<double>::quiet_NaN(), 1.0,
                          2.0, 3.0};
    std::vector<double> out(x.size());
    expit(x, out);
    CHECK(std::isnan(out[1]));
    CHECK(out[0] == 0.5);
  }
}

TEST_CASE("backend selection is explicit and guarded") {
  BackendGuard guard;
  set_backend(Backend::scalar);
  CHECK(active_backend() == Backend::scalar);
  CHECK(backend_supported(Backend::scalar));
  if (backend_supported(Backend::avx2)) {
    set_backend(Backend::avx2);
    CHECK(active_backend() == Backend::avx2);
  } else {
    CHECK_THROWS_AS(set_backend(Backend::avx2), std::invalid_argument);
  }
  CHECK(backend_name(Backend::scalar) == "scalar");
  CHECK(backend_name(Backend::avx2) == "avx2");
}

}  // TEST_SUITE("simd")
