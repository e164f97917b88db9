#pragma once

#include <cstdint>
#include <string>

#include "icemest/data/plan.hpp"
#include "icemest/gcomp/config.hpp"

namespace icemest::sim {

struct ScenarioConfig {
  std::size_t n = 1000;
  int iterations = 1000;
  data::TreatmentPlan plan = data::TreatmentPlan::always();
  std::uint64_t seed = 0;
  std::size_t truth_sample = 1'000'000;
  int workers = 1;
  gcomp::IceConfig ice;
};

// One row of the operating-characteristics table.  Failed iterations are
// excluded from every average; `failed` counts them.
struct ScenarioMetrics {
  std::size_t n = 0;
  std::string estimator;  // "unstratified" | "stratified"
  std::string plan;
  int iterations = 0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double ese = 0.0;       // sd of estimates across iterations
  double ase = 0.0;       // mean sandwich standard error
  double ser = 0.0;       // ase / ese
  double coverage = 0.0;  // fraction of intervals containing the truth
  int failed = 0;
  // False when fewer than two iterations converged (ese/ser undefined).
  bool dispersion_defined = false;
};

// The regression specs used for this mechanism's operating
// characteristics: main effects of the two most recent treatments and
// covariates (treatment terms dropped for the stratified estimator).
// Parameter counts: 14 pooled, 9 stratified.
std::vector<data::DesignSpec> benchmark_designs(bool stratified);

// Generate -> estimate -> summarize, with per-iteration seed substreams so
// any worker count gives identical results.  An empty config.ice.design is
// filled with benchmark_designs().
ScenarioMetrics run_study(const ScenarioConfig& config);

}  // namespace icemest::sim
