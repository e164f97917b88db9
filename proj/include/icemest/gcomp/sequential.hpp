#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "icemest/gcomp/prepare.hpp"

namespace icemest::gcomp {

struct SequentialFit {
  bool ok = false;
  int fail_time = -1;
  std::string failure_reason;  // empty when ok
  // Whether the failure looks like separation (no finite root exists).
  bool separation = false;
  // Full parameter vector in system layout (beta_{tau-1},...,beta_0, mu);
  // only meaningful when ok.
  Eigen::VectorXd theta;
  double mu = 0.0;
  // Plan-side predictions from the time-0 model (the values averaged into
  // mu), for diagnostics and tests.
  std::vector<double> predictions_t0;
};

// The classic backwards algorithm: fractional logistic regression per time
// (weighted least squares on the working response), predictions under the
// plan feeding the next regression, then mu = mean of the final
// predictions.  Its output solves the stacked estimating equation exactly,
// so it doubles as the solver's warm start and as an independent oracle.
SequentialFit sequential_fit(const IcePrepared& prep, const IceConfig& config);

}  // namespace icemest::gcomp
