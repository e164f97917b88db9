#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace icemest::data {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

struct Column {
  std::string name;
  std::vector<double> values;
};

// Wide-format longitudinal data over times 0..tau.  Per time k < tau there
// are a binary treatment A_k and covariates L_k; per time k in 1..tau there
// are a censoring indicator C_k and an outcome Y_k.  Missing entries are
// NaN; validate() enforces the coupling between censoring and missingness.
class LongitudinalDataset {
 public:
  LongitudinalDataset(std::size_t n_units, int tau);

  std::size_t units() const { return n_; }
  int horizon() const { return tau_; }

  // --- treatments, times 0..tau-1 ---
  void set_treatment(int time, std::vector<double> values);
  const std::vector<double>& treatment(int time) const;

  // --- censoring indicators, times 1..tau; monotone within unit ---
  void set_censoring(int time, std::vector<double> values);
  const std::vector<double>& censoring(int time) const;

  // --- outcomes, times 1..tau ---
  void set_outcome(int time, std::vector<double> values);
  const std::vector<double>& outcome(int time) const;

  // --- covariates, times 0..tau-1, addressed by name ---
  void add_covariate(int time, std::string name, std::vector<double> values);
  const std::vector<double>& covariate(int time,
                                       const std::string& name) const;
  bool has_covariate(int time, const std::string& name) const;
  std::vector<std::string> covariate_names(int time) const;

  // 0/1 vector: 1 where the unit is uncensored at `time` (C_time == 0).
  // time == 0 returns all ones.
  std::vector<double> uncensored_mask(int time) const;

  // New dataset formed by rows `indices` (repeats allowed) — the bootstrap
  // resampling primitive.
  LongitudinalDataset select_units(std::span<const std::size_t> indices) const;

  // Structural checks; throws ValidationError at the first violated rule:
  //  - A, C, Y in {0, 1} where observed; C monotone in time
  //  - C_k = 1 implies A_k, L_k, Y_k and everything later are missing
  //  - C_k = 0 implies A_j, L_j, Y_j observed for all j <= k
  void validate() const;

 private:
  std::vector<double>& slot(std::vector<std::vector<double>>& store, int time,
                            int lo, int hi, const char* what);
  const std::vector<double>& slot(
      const std::vector<std::vector<double>>& store, int time, int lo, int hi,
      const char* what) const;

  std::size_t n_;
  int tau_;
  std::vector<std::vector<double>> treatments_;  // index k = 0..tau-1
  std::vector<std::vector<double>> censoring_;   // index k-1, k = 1..tau
  std::vector<std::vector<double>> outcomes_;    // index k-1, k = 1..tau
  std::vector<std::vector<Column>> covariates_;  // index k = 0..tau-1
};

}  // namespace icemest::data
