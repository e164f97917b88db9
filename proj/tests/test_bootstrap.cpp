#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "icemest/boot/bootstrap.hpp"
#include "icemest/data/dataset.hpp"
#include "icemest/data/plan.hpp"
#include "icemest/errors.hpp"
#include "icemest/gcomp/estimate.hpp"
#include "icemest/gcomp/prepare.hpp"
#include "icemest/gcomp/sequential.hpp"
#include "icemest/mest/sandwich.hpp"
#include "icemest/sim/dgm.hpp"

using namespace icemest;
using boot::BootstrapConfig;
using boot::CiMethod;
using data::TreatmentPlan;
using gcomp::IceConfig;

namespace {

// Two-period dataset where only units 0..3 stay on treatment through time 1,
// and their covariate patterns are the four corners of (W0, W1) with an
// exclusive-or outcome.  The full-data fit has an exact interior root (every
// fitted probability is 1/2), but a resample keeps the time-1 regression
// identifiable only while at least three of the four corners survive, so a
// large share of resamples fail for rank reasons.
data::LongitudinalDataset xor_followers() {
  const std::size_t n = 150;
  std::vector<double> w0(n), a0(n), y1(n), w1(n), a1(n), y2(n), zero(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a0[i] = i < 30 ? 1.0 : 0.0;
    a1[i] = i < 4 ? 1.0 : 0.0;
    if (i < 4) {
      w0[i] = (i == 1 || i == 3) ? 1.0 : 0.0;
      w1[i] = (i == 2 || i == 3) ? 1.0 : 0.0;
      y2[i] = w0[i] != w1[i] ? 1.0 : 0.0;
    } else {
      w0[i] = static_cast<double>(i % 2);
      w1[i] = static_cast<double>((i / 2) % 2);
      y2[i] = (i % 5) < 2 ? 1.0 : 0.0;
    }
    y1[i] = i % 3 == 0 ? 1.0 : 0.0;
  }
  data::LongitudinalDataset d(n, 2);
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

}  // namespace

TEST_CASE("bootstrap reproduces the full-data point and reports its pieces") {
  const auto d = sim::generate(250, 61);
  const auto plan = TreatmentPlan::always();
  const IceConfig ice;

  BootstrapConfig config;
  config.resamples = 60;
  config.seed = 5;
  const auto r = boot::bootstrap_estimate(d, plan, ice, config);

  // The point estimate is the sequential fit on the full data, bit for bit.
  const auto prep = gcomp::prepare_ice(d, plan, ice);
  const auto seq = gcomp::sequential_fit(prep, ice);
  REQUIRE(seq.ok);
  CHECK(r.point == seq.mu);

  // ... which is also the stacked-system root.
  const auto est = gcomp::estimate(d, plan, ice);
  REQUIRE(est.converged);
  CHECK(std::abs(r.point - est.mu_hat) < 1e-9);

  CHECK(r.resamples == 60);
  CHECK(static_cast<int>(r.estimates.size()) + r.failures == 60);
  CHECK(r.se > 0.0);
  CHECK_FALSE(r.small_b_warning);
  CHECK(r.workers == 1);
  CHECK(r.wall_seconds > 0.0);

  // Normal interval is the Wald interval around the full-data point.
  const auto wald = mest::wald_ci(r.point, r.se, ice.level);
  CHECK(r.ci.first == wald.first);
  CHECK(r.ci.second == wald.second);

  // The resamples actually vary.
  const auto mn = *std::min_element(r.estimates.begin(), r.estimates.end());
  const auto mx = *std::max_element(r.estimates.begin(), r.estimates.end());
  CHECK(mx > mn);
}

TEST_CASE("worker count changes nothing but the thread pool") {
  const auto d = sim::generate(200, 62);
  const auto plan = TreatmentPlan::always();
  const IceConfig ice;

  BootstrapConfig one;
  one.resamples = 24;
  one.seed = 9;
  one.workers = 1;
  BootstrapConfig three = one;
  three.workers = 3;

  const auto r1 = boot::bootstrap_estimate(d, plan, ice, one);
  const auto r3 = boot::bootstrap_estimate(d, plan, ice, three);
  CHECK(r1.point == r3.point);
  CHECK(r1.se == r3.se);
  CHECK(r1.failures == r3.failures);
  CHECK(testutil::same_vector(r1.estimates, r3.estimates));
  CHECK(r1.ci.first == r3.ci.first);
  CHECK(r1.ci.second == r3.ci.second);
  CHECK(r1.workers == 1);
  CHECK(r3.workers == 3);
}

TEST_CASE("percentile interval interpolates the sorted resample estimates") {
  const auto d = sim::generate(220, 63);
  BootstrapConfig config;
  config.resamples = 40;
  config.seed = 17;
  config.ci_method = CiMethod::percentile;
  const auto r =
      boot::bootstrap_estimate(d, TreatmentPlan::never(), {}, config);

  std::vector<double> sorted = r.estimates;
  REQUIRE(sorted.size() >= 2);
  std::sort(sorted.begin(), sorted.end());
  const auto interp = [&sorted](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  CHECK(std::abs(r.ci.first - interp(0.025)) < 1e-12);
  CHECK(std::abs(r.ci.second - interp(0.975)) < 1e-12);
  CHECK(r.ci.first <= r.ci.second);
  CHECK(r.ci.first >= sorted.front());
  CHECK(r.ci.second <= sorted.back());
}

TEST_CASE("fewer than 30 usable resamples flags the noisy standard error") {
  const auto d = testutil::random_two_period(150, 3);
  BootstrapConfig config;
  config.resamples = 20;
  config.seed = 3;
  const auto r =
      boot::bootstrap_estimate(d, TreatmentPlan::always(), {}, config);
  CHECK(r.small_b_warning);
  CHECK(r.estimates.size() >= 2);
}

TEST_CASE("bootstrap rejects nonsensical configuration") {
  const auto d = testutil::random_two_period(40, 1);
  BootstrapConfig too_few;
  too_few.resamples = 1;
  CHECK_THROWS_AS(
      boot::bootstrap_estimate(d, TreatmentPlan::always(), {}, too_few),
      ConfigError);

  BootstrapConfig no_workers;
  no_workers.workers = 0;
  CHECK_THROWS_AS(
      boot::bootstrap_estimate(d, TreatmentPlan::always(), {}, no_workers),
      ConfigError);
}

TEST_CASE("a full-data failure aborts before any resampling") {
  auto d = testutil::random_two_period(120, 21);
  // Nobody stays treated twice, so the custom(1,1) follower stratum at
  // time 1 is empty and the full-data fit cannot start.
  auto a0 = d.treatment(0);
  auto a1 = d.treatment(1);
  for (std::size_t i = 0; i < 120; ++i) {
    if (a0[i] == 1.0) a1[i] = 0.0;
  }
  d.set_treatment(1, a1);

  IceConfig ice;
  ice.stratified = true;
  BootstrapConfig config;
  config.resamples = 10;
  bool thrown = false;
  try {
    boot::bootstrap_estimate(d, TreatmentPlan::custom({1, 1}), ice, config);
  } catch (const EstimationFailed& e) {
    thrown = true;
    const std::string msg = e.what();
    CHECK(msg.find("full-data fit failed") != std::string::npos);
    CHECK(msg.find("empty fitting stratum at time 1") != std::string::npos);
  }
  CHECK(thrown);
}

TEST_CASE("degenerate resamples are counted and abort past the ceiling") {
  const auto d = xor_followers();
  IceConfig ice;
  ice.stratified = true;

  // The full-data fit itself is healthy: the four corners are all present,
  // the score vanishes at zero, and every fitted probability is 1/2.
  const auto est = gcomp::estimate(d, TreatmentPlan::always(), ice);
  REQUIRE(est.converged);
  CHECK(std::abs(est.mu_hat - 0.5) < 1e-9);

  BootstrapConfig config;
  config.resamples = 50;
  config.seed = 29;
  bool thrown = false;
  try {
    boot::bootstrap_estimate(d, TreatmentPlan::always(), ice, config);
  } catch (const TooManyFailures& e) {
    thrown = true;
    CHECK(e.failures > 10);
    CHECK(e.resamples == 50);
  }
  CHECK(thrown);
}
