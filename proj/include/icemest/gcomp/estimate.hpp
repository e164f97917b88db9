#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "icemest/data/dataset.hpp"
#include "icemest/data/plan.hpp"
#include "icemest/gcomp/config.hpp"

namespace icemest::gcomp {

struct IntervalEstimate {
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double ci_lower = std::numeric_limits<double>::quiet_NaN();
  double ci_upper = std::numeric_limits<double>::quiet_NaN();
};

// Counterfactual-mean estimate with sandwich uncertainty.  `converged`
// false means the stacked estimating equation had no usable root (empty
// stratum, separation, solver failure, or singular bread); the numeric
// fields are NaN then and `failure_reason` says why.
struct EstimateResult {
  double mu_hat = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double ci_lower = std::numeric_limits<double>::quiet_NaN();
  double ci_upper = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  std::string failure_reason;

  Eigen::VectorXd theta;       // full root (empty on failure)
  Eigen::MatrixXd covariance;  // parameter covariance (empty on failure)
  std::vector<int> block_times;
  std::vector<std::size_t> block_offsets;
  std::vector<std::size_t> block_sizes;
  std::size_t mu_index = 0;
};

EstimateResult estimate(const data::LongitudinalDataset& data,
                        const data::TreatmentPlan& plan,
                        const IceConfig& config = {});

// Both plans plus their difference from one stacked system, so the
// difference's standard error accounts for the shared sample.
struct ContrastResult {
  IntervalEstimate plan_a;
  IntervalEstimate plan_b;
  IntervalEstimate difference;
  bool converged = false;
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  std::string failure_reason;
};

ContrastResult estimate_contrast(const data::LongitudinalDataset& data,
                                 const data::TreatmentPlan& plan_a,
                                 const data::TreatmentPlan& plan_b,
                                 const IceConfig& config = {});

}  // namespace icemest::gcomp
