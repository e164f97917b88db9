#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "icemest/data/dataset.hpp"
#include "icemest/data/plan.hpp"

namespace icemest::data {

// --- model terms -----------------------------------------------------------
struct TermIntercept {};
struct TermTreatment {
  int time;
};
struct TermCovariate {
  int time;
  std::string name;
};
// 1{L_time,name == value}; for expanding categorical covariates by hand.
struct TermIndicator {
  int time;
  std::string name;
  double value;
};
// Restricted cubic spline: the linear column plus knots.size()-2 curvature
// columns (so it needs >= 3 distinct, sorted knots).
struct TermSpline {
  int time;
  std::string name;
  std::vector<double> knots;
};
// Product of two earlier single-column terms, referenced by index.
struct TermInteraction {
  std::size_t first;
  std::size_t second;
};

using Term = std::variant<TermIntercept, TermTreatment, TermCovariate,
                          TermIndicator, TermSpline, TermInteraction>;

// Column block for the regression at one time point.
struct DesignSpec {
  std::vector<Term> terms;

  // Intercept, A_0..A_time, then all covariates at 0..time in dataset order.
  static DesignSpec full_history(const LongitudinalDataset& data, int time);
  // Same without the treatment columns (the plan-stratified estimator's
  // default, where treatment is constant within the fitting stratum).
  static DesignSpec covariate_history(const LongitudinalDataset& data,
                                      int time);

  std::size_t column_count() const;
  bool has_treatment_term() const;
  std::vector<std::string> column_names() const;
};

// Dense column-major design block.  Rows with valid == 0 are zero-filled so
// downstream kernels never touch NaN; consumers multiply by `valid` (or a
// stricter mask) before accumulating.
struct DesignMatrix {
  std::size_t n = 0;
  std::vector<std::vector<double>> columns;
  std::vector<std::string> names;
  std::vector<double> valid;  // 1 where every referenced value is observed

  std::span<const double> col(std::size_t j) const { return columns[j]; }
};

// Builds the block for the regression at `time`.  When `plan` is non-null
// and deterministic, treatment terms take the plan's assigned values;
// a null plan or the natural-course plan keeps observed treatments.
DesignMatrix design_matrix(const LongitudinalDataset& data, int time,
                           const DesignSpec& spec,
                           const TreatmentPlan* plan = nullptr);

// 0/1 vector: 1 where observed treatments match the plan through `time`
// (and are observed).  Natural course follows everyone.
std::vector<double> followers_mask(const LongitudinalDataset& data,
                                   const TreatmentPlan& plan, int time);

// Harrell's restricted cubic spline basis for one input vector: column 0 is
// x itself, columns 1..m-2 the curvature terms (linear beyond the tails).
std::vector<std::vector<double>> rcspline_basis(std::span<const double> x,
                                                std::span<const double> knots);

}  // namespace icemest::data
