#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "icemest/data/dataset.hpp"
#include "icemest/util/rng.hpp"

namespace testutil {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Hand-sized two-period dataset (tau = 2) with one covariate "W" per time.
// Unit 3 is censored at time 1 (row wiped from time 1 on); unit 5 is
// censored at time 2, so only its final outcome is missing.
inline icemest::data::LongitudinalDataset two_period() {
  using icemest::data::LongitudinalDataset;
  LongitudinalDataset d(6, 2);
  d.set_treatment(0, {1, 0, 1, 1, 0, 1});
  d.set_treatment(1, {1, 0, 0, kNaN, 1, 1});
  d.set_censoring(1, {0, 0, 0, 1, 0, 0});
  d.set_censoring(2, {0, 0, 0, 1, 0, 1});
  d.set_outcome(1, {0, 1, 0, kNaN, 1, 0});
  d.set_outcome(2, {1, 0, 1, kNaN, 0, kNaN});
  d.add_covariate(0, "W", {0, 1, 1, 0, 1, 0});
  d.add_covariate(1, "W", {1, 0, 1, kNaN, 1, 0});
  return d;
}

// Bigger random two-period dataset, no censoring, binary covariates.
inline icemest::data::LongitudinalDataset random_two_period(
    std::size_t n, std::uint64_t seed) {
  using icemest::data::LongitudinalDataset;
  icemest::util::Rng rng(seed, 0);
  LongitudinalDataset d(n, 2);
  std::vector<double> w0(n), a0(n), y1(n), w1(n), a1(n), y2(n), zero(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    w0[i] = rng.bernoulli(0.5);
    a0[i] = rng.bernoulli(0.3 + 0.4 * w0[i]);
    y1[i] = rng.bernoulli(0.2 + 0.2 * w0[i] + 0.1 * a0[i]);
    w1[i] = rng.bernoulli(0.3 + 0.3 * w0[i]);
    a1[i] = rng.bernoulli(0.2 + 0.3 * a0[i] + 0.3 * w1[i]);
    y2[i] = rng.bernoulli(0.15 + 0.25 * w1[i] + 0.2 * a1[i]);
  }
  d.set_treatment(0, a0);
  d.set_treatment(1, a1);
  d.set_censoring(1, zero);
  d.set_censoring(2, zero);
  d.set_outcome(1, y1);
  d.set_outcome(2, y2);
  d.add_covariate(0, "W", w0);
  d.add_covariate(1, "W", w1);
  return d;
}

inline bool same_value(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

inline bool same_vector(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_value(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace testutil
