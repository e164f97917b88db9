#pragma once

#include <cstddef>
#include <vector>

#include "icemest/data/dataset.hpp"
#include "icemest/data/design.hpp"
#include "icemest/data/plan.hpp"
#include "icemest/gcomp/config.hpp"

namespace icemest::gcomp {

// One regression block of the stacked system.
struct IceBlock {
  int time = 0;             // k: models the outcome/pseudo-outcome at k+1
  std::size_t offset = 0;   // position of beta_k inside theta
  std::size_t ncols = 0;
  data::DesignMatrix x;     // observed treatments (fitting side)
  data::DesignMatrix xstar; // plan treatments (prediction side)
  // 1 for units contributing to this block's score: uncensored at k+1,
  // intersected with plan followers through k when stratified.
  std::vector<double> fit_mask;
};

// Everything the estimating system and the sequential fitter share.  The
// parameter layout is (beta_{tau-1}, ..., beta_0, mu).
struct IcePrepared {
  std::size_t n = 0;
  int tau = 0;
  bool stratified = false;
  OutcomeKind outcome = OutcomeKind::repeated_measures;
  data::TreatmentPlan plan = data::TreatmentPlan::always();
  std::vector<IceBlock> blocks;  // indexed by time k = 0..tau-1
  // Final outcome Y_tau with missing entries zero-filled (they only appear
  // under a zero mask).
  std::vector<double> y_final;
  // Observed Y_1..Y_{tau-1}, zero-filled, for the absorbing-event carry;
  // index k-1.  Empty for repeated measures.
  std::vector<std::vector<double>> y_carry;
  std::size_t dim = 0;       // sum of block widths + 1
  std::size_t mu_index = 0;  // dim - 1

  const IceBlock& block_at_time(int k) const { return blocks[std::size_t(k)]; }
};

// Validates the dataset, resolves default designs, builds both design
// matrices per time, the fit masks, and (for time-to-event) checks the
// event is absorbing.  Throws ConfigError / ValidationError /
// EventNonMonotone; an *empty* stratum is not structural and is left for
// estimate() to report as a convergence failure.
IcePrepared prepare_ice(const data::LongitudinalDataset& data,
                        const data::TreatmentPlan& plan,
                        const IceConfig& config);

}  // namespace icemest::gcomp
