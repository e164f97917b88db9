#pragma once

#include <cstdint>

#include "icemest/data/dataset.hpp"
#include "icemest/data/plan.hpp"

namespace icemest::sim {

// One unit's complete draw: every potential covariate/outcome branch plus
// the observed treatment and censoring path.  Indexing of the potential
// arrays is by the binary treatment history, e.g. y2[a0*2 + a1].
struct DgmDraw {
  double l0;
  double y1[2];   // by a0
  double l1[2];   // by a0
  double y2[4];   // by (a0, a1)
  double l2[4];   // by (a0, a1)
  double y3[8];   // by (a0, a1, a2)
  double a0, a1, a2;
  double c1, c2, c3;
};

// Draws one unit; all branches are sampled in a fixed order from the unit's
// own substream, so unit i of a given seed is identical for any n.
DgmDraw draw_unit(std::uint64_t seed, std::uint64_t unit);

struct GenerateOptions {
  bool censoring = true;
};

// Three-period observed dataset: baseline covariate L0, treatments A0..A2,
// censoring C1..C3, outcomes Y1..Y3, with consistency linking observed
// values to the drawn potentials and censoring wiping everything after the
// first C_k = 1.
data::LongitudinalDataset generate(std::size_t n_units, std::uint64_t seed,
                                   const GenerateOptions& options = {});

// Monte Carlo counterfactual mean of Y3 under the plan; deterministic plans
// follow the forced branch, natural_course simulates the observed treatment
// process without censoring.
double true_value(const data::TreatmentPlan& plan, std::size_t sample_size,
                  std::uint64_t seed);

// Closed-form counterfactual mean for deterministic plans, by enumerating
// the eight (L0, L1, L2) paths.  Used to pin the Monte Carlo estimate.
double true_value_exact(const data::TreatmentPlan& plan);

}  // namespace icemest::sim
