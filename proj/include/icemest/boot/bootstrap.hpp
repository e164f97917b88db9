#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "icemest/data/dataset.hpp"
#include "icemest/data/plan.hpp"
#include "icemest/gcomp/config.hpp"

namespace icemest::boot {

enum class CiMethod { normal, percentile };

struct BootstrapConfig {
  int resamples = 500;
  std::uint64_t seed = 0;
  int workers = 1;
  CiMethod ci_method = CiMethod::normal;
  // Abort (TooManyFailures) when more than this fraction of resamples fail.
  double max_failure_fraction = 0.20;
};

struct BootstrapResult {
  double point = 0.0;  // full-data estimate (sequential fit)
  double se = 0.0;     // sample sd of the resample estimates
  std::pair<double, double> ci{0.0, 0.0};
  std::vector<double> estimates;  // successful resamples, in resample order
  int resamples = 0;
  int failures = 0;
  double wall_seconds = 0.0;
  int workers = 1;
  // Fewer than 30 resamples: the sd is too noisy to trust.
  bool small_b_warning = false;
};

// Nonparametric bootstrap over units.  Each resample draws n unit indices
// with replacement from its own substream of `seed` (so results do not
// depend on scheduling) and re-runs the sequential point estimate only —
// no sandwich work.  Failed resamples are dropped and counted.  Throws
// EstimationFailed if the full-data fit fails, TooManyFailures past the
// configured fraction.
BootstrapResult bootstrap_estimate(const data::LongitudinalDataset& data,
                                   const data::TreatmentPlan& plan,
                                   const gcomp::IceConfig& ice_config,
                                   const BootstrapConfig& config);

}  // namespace icemest::boot
