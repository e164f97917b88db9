#include "icemest/sim/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "icemest/errors.hpp"
#include "icemest/gcomp/estimate.hpp"
#include "icemest/sim/dgm.hpp"
#include "icemest/util/rng.hpp"
#include "icemest/util/stats.hpp"

namespace icemest::sim {

namespace {
// Stream keys separating the truth draw from the per-iteration datasets.
constexpr std::uint64_t kTruthKey = 0x74727574680000ULL;
constexpr std::uint64_t kIterationBase = 1'000'000'007ULL;
}  // namespace

std::vector<data::DesignSpec> benchmark_designs(bool stratified) {
  using data::Term;
  using data::TermCovariate;
  using data::TermIntercept;
  using data::TermTreatment;
  auto spec = [&](std::initializer_list<int> a_times,
                  std::initializer_list<int> l_times) {
    data::DesignSpec s;
    s.terms.emplace_back(TermIntercept{});
    if (!stratified) {
      for (int t : a_times) s.terms.emplace_back(TermTreatment{t});
    }
    for (int t : l_times) s.terms.emplace_back(TermCovariate{t, "L"});
    return s;
  };
  return {spec({0}, {0}), spec({0, 1}, {0, 1}), spec({1, 2}, {1, 2})};
}

ScenarioMetrics run_study(const ScenarioConfig& config) {
  if (config.iterations < 1) {
    throw ConfigError("simulation needs at least one iteration");
  }
  if (config.workers < 1) throw ConfigError("workers must be positive");

  gcomp::IceConfig ice = config.ice;
  if (ice.design.empty()) {
    ice.design = benchmark_designs(ice.stratified);
  }

  const int iters = config.iterations;
  std::vector<double> mu(static_cast<std::size_t>(iters));
  std::vector<double> se(static_cast<std::size_t>(iters));
  std::vector<double> lo(static_cast<std::size_t>(iters));
  std::vector<double> hi(static_cast<std::size_t>(iters));
  std::vector<char> ok(static_cast<std::size_t>(iters), 0);

  auto run_one = [&](int it) {
    const std::uint64_t iteration_seed =
        util::derive_seed(config.seed, kIterationBase + std::uint64_t(it));
    const auto dataset = generate(config.n, iteration_seed);
    const auto result = gcomp::estimate(dataset, config.plan, ice);
    if (result.converged) {
      const std::size_t j = static_cast<std::size_t>(it);
      mu[j] = result.mu_hat;
      se[j] = result.se;
      lo[j] = result.ci_lower;
      hi[j] = result.ci_upper;
      ok[j] = 1;
    }
  };

  const int workers = std::min(config.workers, iters);
  if (workers <= 1) {
    for (int it = 0; it < iters; ++it) run_one(it);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int it = next.fetch_add(1); it < iters; it = next.fetch_add(1)) {
          run_one(it);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  ScenarioMetrics metrics;
  metrics.n = config.n;
  metrics.estimator = ice.stratified ? "stratified" : "unstratified";
  metrics.plan = config.plan.label();
  metrics.iterations = iters;
  metrics.truth = true_value(config.plan, config.truth_sample,
                             util::derive_seed(config.seed, kTruthKey));

  std::vector<double> mus, ses;
  int covered = 0;
  for (int it = 0; it < iters; ++it) {
    const std::size_t j = static_cast<std::size_t>(it);
    if (!ok[j]) continue;
    mus.push_back(mu[j]);
    ses.push_back(se[j]);
    if (lo[j] <= metrics.truth && metrics.truth <= hi[j]) ++covered;
  }
  metrics.failed = iters - static_cast<int>(mus.size());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (mus.empty()) {
    metrics.mean_estimate = nan;
    metrics.bias = nan;
    metrics.ase = nan;
    metrics.coverage = nan;
  } else {
    metrics.mean_estimate = util::mean(mus);
    metrics.bias = metrics.mean_estimate - metrics.truth;
    metrics.ase = util::mean(ses);
    metrics.coverage =
        static_cast<double>(covered) / static_cast<double>(mus.size());
  }
  if (mus.size() >= 2) {
    metrics.ese = util::sample_sd(mus);
    metrics.ser = metrics.ase / metrics.ese;
    metrics.dispersion_defined = true;
  } else {
    metrics.ese = nan;
    metrics.ser = nan;
    metrics.dispersion_defined = false;
  }
  return metrics;
}

}  // namespace icemest::sim
