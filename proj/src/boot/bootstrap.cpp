#include "icemest/boot/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "icemest/errors.hpp"
#include "icemest/gcomp/prepare.hpp"
#include "icemest/gcomp/sequential.hpp"
#include "icemest/mest/sandwich.hpp"
#include "icemest/util/rng.hpp"
#include "icemest/util/stats.hpp"

namespace icemest::boot {

namespace {

// Linear-interpolation quantile on a sorted copy.
double quantile(std::vector<double> sorted, double q) {
  const std::size_t n = sorted.size();
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

BootstrapResult bootstrap_estimate(const data::LongitudinalDataset& data,
                                   const data::TreatmentPlan& plan,
                                   const gcomp::IceConfig& ice_config,
                                   const BootstrapConfig& config) {
  if (config.resamples < 2) {
    throw ConfigError("bootstrap needs at least 2 resamples");
  }
  if (config.workers < 1) {
    throw ConfigError("bootstrap workers must be positive");
  }
  const auto t0 = std::chrono::steady_clock::now();

  // Full-data point estimate via the sequential path.
  const gcomp::IcePrepared prep = gcomp::prepare_ice(data, plan, ice_config);
  const gcomp::SequentialFit full = gcomp::sequential_fit(prep, ice_config);
  if (!full.ok) {
    throw EstimationFailed("full-data fit failed: " + full.failure_reason);
  }

  const std::size_t n = data.units();
  const int B = config.resamples;
  std::vector<double> values(static_cast<std::size_t>(B));
  std::vector<char> ok(static_cast<std::size_t>(B), 0);

  auto run_one = [&](int b) {
    util::Rng rng(config.seed, static_cast<std::uint64_t>(b));
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = rng.uniform_index(n);
    const auto resample = data.select_units(indices);
    try {
      const auto p = gcomp::prepare_ice(resample, plan, ice_config);
      const auto fit = gcomp::sequential_fit(p, ice_config);
      if (fit.ok) {
        values[static_cast<std::size_t>(b)] = fit.mu;
        ok[static_cast<std::size_t>(b)] = 1;
      }
    } catch (const Error&) {
      // Degenerate resample (e.g. a covariate went constant); counts as a
      // failed resample rather than aborting the whole run.
    }
  };

  const int workers = std::min(config.workers, B);
  if (workers <= 1) {
    for (int b = 0; b < B; ++b) run_one(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int b = next.fetch_add(1); b < B; b = next.fetch_add(1)) {
          run_one(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  BootstrapResult result;
  result.point = full.mu;
  result.resamples = B;
  result.workers = workers;
  for (int b = 0; b < B; ++b) {
    if (ok[static_cast<std::size_t>(b)]) {
      result.estimates.push_back(values[static_cast<std::size_t>(b)]);
    }
  }
  result.failures = B - static_cast<int>(result.estimates.size());
  if (static_cast<double>(result.failures) >
      config.max_failure_fraction * static_cast<double>(B)) {
    throw TooManyFailures(result.failures, B);
  }
  if (result.estimates.size() < 2) {
    throw TooManyFailures(result.failures, B);
  }

  result.se = util::sample_sd(result.estimates);
  result.small_b_warning = static_cast<int>(result.estimates.size()) < 30;
  if (config.ci_method == CiMethod::normal) {
    result.ci = mest::wald_ci(result.point, result.se, ice_config.level);
  } else {
    std::vector<double> sorted = result.estimates;
    std::sort(sorted.begin(), sorted.end());
    const double alpha = 1.0 - ice_config.level;
    result.ci = {quantile(sorted, alpha / 2.0),
                 quantile(std::move(sorted), 1.0 - alpha / 2.0)};
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace icemest::boot
