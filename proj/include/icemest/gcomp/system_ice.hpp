#pragma once

#include <memory>

#include "icemest/gcomp/prepare.hpp"
#include "icemest/mest/system.hpp"

namespace icemest::gcomp {

namespace detail {

// Shared evaluators over a prepared block set and a theta sub-span laid out
// as (beta_{tau-1},...,beta_0, mu).  The stacked contrast system reuses
// them on sub-ranges of its parameter vector.
void eval_psi_sum(const IcePrepared& prep, std::span<const double> theta,
                  std::span<double> out);
void eval_psi_unit(const IcePrepared& prep, std::size_t unit,
                   std::span<const double> theta, std::span<double> out);
// Writes per-unit psi values into columns[column_offset + j].
void eval_psi_columns(const IcePrepared& prep, std::span<const double> theta,
                      std::vector<std::vector<double>>& columns,
                      std::size_t column_offset);
// Plan-side expit predictions from each block, with the absorbing-event
// carry applied; predictions[k] has length n.
void eval_predictions(const IcePrepared& prep, std::span<const double> theta,
                      std::vector<std::vector<double>>& predictions);
// Largest |linear predictor| over each block's fitting stratum; the
// separation diagnostic.
double max_active_eta(const IcePrepared& prep, std::span<const double> theta);

}  // namespace detail

// The full ICE stack as one estimating function: logistic score blocks for
// times tau-1..0 plus the final row mean(prediction at time 0) - mu.
class IceSystem final : public mest::EstimatingSystem {
 public:
  explicit IceSystem(std::shared_ptr<const IcePrepared> prep);

  void psi(std::size_t unit, std::span<const double> theta,
           std::span<double> out) const override;
  void psi_sum(std::span<const double> theta,
               std::span<double> out) const override;
  void psi_columns(std::span<const double> theta,
                   std::vector<std::vector<double>>& columns) const override;

  const IcePrepared& prepared() const { return *prep_; }
  double max_active_eta(std::span<const double> theta) const {
    return detail::max_active_eta(*prep_, theta);
  }

 private:
  std::shared_ptr<const IcePrepared> prep_;
};

// Two plan stacks solved jointly with one extra parameter: the last row is
// (mu_a - mu_b) - mu_diff, so the sandwich covers the contrast directly.
class StackedContrastSystem final : public mest::EstimatingSystem {
 public:
  StackedContrastSystem(std::shared_ptr<const IcePrepared> plan_a,
                        std::shared_ptr<const IcePrepared> plan_b);

  void psi(std::size_t unit, std::span<const double> theta,
           std::span<double> out) const override;
  void psi_sum(std::span<const double> theta,
               std::span<double> out) const override;
  void psi_columns(std::span<const double> theta,
                   std::vector<std::vector<double>>& columns) const override;

  std::size_t dim_a() const { return a_->dim; }
  std::size_t dim_b() const { return b_->dim; }
  std::size_t mu_a_index() const { return a_->mu_index; }
  std::size_t mu_b_index() const { return a_->dim + b_->mu_index; }
  std::size_t mu_diff_index() const { return a_->dim + b_->dim; }
  const IcePrepared& prepared_a() const { return *a_; }
  const IcePrepared& prepared_b() const { return *b_; }
  double max_active_eta(std::span<const double> theta) const;

 private:
  std::shared_ptr<const IcePrepared> a_;
  std::shared_ptr<const IcePrepared> b_;
};

}  // namespace icemest::gcomp
