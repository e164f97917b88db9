#pragma once

#include <vector>

#include "icemest/data/design.hpp"
#include "icemest/mest/solver.hpp"

namespace icemest::gcomp {

enum class OutcomeKind {
  // Model Y_tau through iterated pseudo-outcomes at every earlier time.
  repeated_measures,
  // Absorbing event: once Y_k = 1, later pseudo-outcomes are carried
  // forward as 1 instead of modeled.
  time_to_event,
};

struct IceConfig {
  // Pooled estimator fits every uncensored unit with treatment columns in
  // the design; the stratified one fits plan followers only, with
  // covariate-only designs (treatment is constant inside the stratum).
  bool stratified = false;
  OutcomeKind outcome = OutcomeKind::repeated_measures;
  // One spec per regression time 0..tau-1; empty uses the defaults
  // (full_history or covariate_history to match `stratified`).
  std::vector<data::DesignSpec> design;
  double level = 0.95;
  mest::SolveConfig solve;

  // Sequential-fit controls.  The IRLS stopping rule uses the same max-norm
  // of the mean score as the root solver, and must use the same tolerance:
  // under quasi-separation the score decays like exp(-|coef|), so a tighter
  // inner tolerance walks the separated coefficient deep enough to make the
  // bread numerically singular even though the root test at 1e-9 is already
  // satisfied much earlier.
  int irls_max_iterations = 100;
  double irls_tolerance = 1e-9;
  // |linear predictor| above this over the fitting stratum is treated as
  // separation: the likelihood has no interior maximum and the estimating
  // equation no root.  A score-tolerance-bounded walk stops each separated
  // coefficient near ln(n/tol) ~ 26, and jointly separated 0/1 covariates
  // can stack two of those in one unit's predictor, so the guard sits well
  // above that; it only fires when the predictor keeps growing anyway
  // (continuous covariates, genuinely unbounded directions).
  double separation_eta = 100.0;
};

}  // namespace icemest::gcomp
