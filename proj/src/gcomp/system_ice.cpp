#include "icemest/gcomp/system_ice.hpp"

#include <algorithm>
#include <cmath>

#include "icemest/errors.hpp"
#include "icemest/simd/kernels.hpp"

namespace icemest::gcomp {
namespace detail {

void eval_predictions(const IcePrepared& prep, std::span<const double> theta,
                      std::vector<std::vector<double>>& predictions) {
  const std::size_t n = prep.n;
  predictions.assign(static_cast<std::size_t>(prep.tau),
                     std::vector<double>(n, 0.0));
  std::vector<double> eta(n);
  for (int k = 0; k < prep.tau; ++k) {
    const IceBlock& block = prep.block_at_time(k);
    simd::fill(eta, 0.0);
    for (std::size_t j = 0; j < block.ncols; ++j) {
      simd::axpy(theta[block.offset + j], block.xstar.col(j), eta);
    }
    auto& pred = predictions[std::size_t(k)];
    simd::expit(eta, pred);
    if (prep.outcome == OutcomeKind::time_to_event && k >= 1) {
      const auto& y_prev = prep.y_carry[std::size_t(k - 1)];
      for (std::size_t i = 0; i < n; ++i) {
        if (y_prev[i] == 1.0) pred[i] = 1.0;
      }
    }
  }
}

namespace {

// Fitted-side residual for block k at theta: r = (target - expit(X beta))
// * fit_mask, where target is Y_tau for the last block and the next
// block's plan-side prediction otherwise.
void block_residual(const IcePrepared& prep, int k,
                    std::span<const double> theta,
                    const std::vector<std::vector<double>>& predictions,
                    std::vector<double>& eta, std::vector<double>& p,
                    std::vector<double>& r) {
  const IceBlock& block = prep.block_at_time(k);
  simd::fill(eta, 0.0);
  for (std::size_t j = 0; j < block.ncols; ++j) {
    simd::axpy(theta[block.offset + j], block.x.col(j), eta);
  }
  simd::expit(eta, p);
  const std::vector<double>& target = (k == prep.tau - 1)
                                          ? prep.y_final
                                          : predictions[std::size_t(k + 1)];
  simd::residual(target, p, block.fit_mask, r);
}

}  // namespace

void eval_psi_sum(const IcePrepared& prep, std::span<const double> theta,
                  std::span<double> out) {
  if (theta.size() != prep.dim || out.size() != prep.dim) {
    throw DimensionMismatch("eval_psi_sum: theta/out length mismatch");
  }
  const std::size_t n = prep.n;
  std::vector<std::vector<double>> predictions;
  eval_predictions(prep, theta, predictions);

  std::vector<double> eta(n), p(n), r(n);
  for (int k = prep.tau - 1; k >= 0; --k) {
    const IceBlock& block = prep.block_at_time(k);
    block_residual(prep, k, theta, predictions, eta, p, r);
    for (std::size_t j = 0; j < block.ncols; ++j) {
      out[block.offset + j] = simd::dot(r, block.x.col(j));
    }
  }
  out[prep.mu_index] = simd::sum(predictions[0]) -
                       static_cast<double>(n) * theta[prep.mu_index];
}

void eval_psi_columns(const IcePrepared& prep, std::span<const double> theta,
                      std::vector<std::vector<double>>& columns,
                      std::size_t column_offset) {
  const std::size_t n = prep.n;
  std::vector<std::vector<double>> predictions;
  eval_predictions(prep, theta, predictions);

  std::vector<double> eta(n), p(n), r(n);
  for (int k = prep.tau - 1; k >= 0; --k) {
    const IceBlock& block = prep.block_at_time(k);
    block_residual(prep, k, theta, predictions, eta, p, r);
    for (std::size_t j = 0; j < block.ncols; ++j) {
      simd::mul(r, block.x.col(j), columns[column_offset + block.offset + j]);
    }
  }
  auto& mu_col = columns[column_offset + prep.mu_index];
  const double mu = theta[prep.mu_index];
  for (std::size_t i = 0; i < n; ++i) mu_col[i] = predictions[0][i] - mu;
}

void eval_psi_unit(const IcePrepared& prep, std::size_t unit,
                   std::span<const double> theta, std::span<double> out) {
  if (theta.size() != prep.dim || out.size() != prep.dim) {
    throw DimensionMismatch("eval_psi_unit: theta/out length mismatch");
  }
  // Scalar mirror of the vector path, one row at a time.
  std::vector<double> pred(static_cast<std::size_t>(prep.tau));
  for (int k = 0; k < prep.tau; ++k) {
    const IceBlock& block = prep.block_at_time(k);
    double eta = 0.0;
    for (std::size_t j = 0; j < block.ncols; ++j) {
      eta += theta[block.offset + j] * block.xstar.col(j)[unit];
    }
    double value = simd::expit1(eta);
    if (prep.outcome == OutcomeKind::time_to_event && k >= 1 &&
        prep.y_carry[std::size_t(k - 1)][unit] == 1.0) {
      value = 1.0;
    }
    pred[std::size_t(k)] = value;
  }
  for (int k = prep.tau - 1; k >= 0; --k) {
    const IceBlock& block = prep.block_at_time(k);
    double eta = 0.0;
    for (std::size_t j = 0; j < block.ncols; ++j) {
      eta += theta[block.offset + j] * block.x.col(j)[unit];
    }
    const double p = simd::expit1(eta);
    const double target = (k == prep.tau - 1) ? prep.y_final[unit]
                                              : pred[std::size_t(k + 1)];
    const double r = (target - p) * block.fit_mask[unit];
    for (std::size_t j = 0; j < block.ncols; ++j) {
      out[block.offset + j] = r * block.x.col(j)[unit];
    }
  }
  out[prep.mu_index] = pred[0] - theta[prep.mu_index];
}

double max_active_eta(const IcePrepared& prep, std::span<const double> theta) {
  const std::size_t n = prep.n;
  std::vector<double> eta(n);
  double worst = 0.0;
  for (int k = 0; k < prep.tau; ++k) {
    const IceBlock& block = prep.block_at_time(k);
    simd::fill(eta, 0.0);
    for (std::size_t j = 0; j < block.ncols; ++j) {
      simd::axpy(theta[block.offset + j], block.x.col(j), eta);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (block.fit_mask[i] == 1.0) {
        worst = std::max(worst, std::fabs(eta[i]));
      }
    }
  }
  return worst;
}

}  // namespace detail

IceSystem::IceSystem(std::shared_ptr<const IcePrepared> prep)
    : mest::EstimatingSystem(prep->n, prep->dim), prep_(std::move(prep)) {}

void IceSystem::psi(std::size_t unit, std::span<const double> theta,
                    std::span<double> out) const {
  detail::eval_psi_unit(*prep_, unit, theta, out);
}

void IceSystem::psi_sum(std::span<const double> theta,
                        std::span<double> out) const {
  detail::eval_psi_sum(*prep_, theta, out);
}

void IceSystem::psi_columns(std::span<const double> theta,
                            std::vector<std::vector<double>>& columns) const {
  allocate_columns(columns);
  detail::eval_psi_columns(*prep_, theta, columns, 0);
}

StackedContrastSystem::StackedContrastSystem(
    std::shared_ptr<const IcePrepared> plan_a,
    std::shared_ptr<const IcePrepared> plan_b)
    : mest::EstimatingSystem(plan_a->n, plan_a->dim + plan_b->dim + 1),
      a_(std::move(plan_a)),
      b_(std::move(plan_b)) {
  if (a_->n != b_->n || a_->tau != b_->tau) {
    throw DimensionMismatch(
        "stacked contrast needs both plans prepared on the same dataset");
  }
}

void StackedContrastSystem::psi(std::size_t unit, std::span<const double> theta,
                                std::span<double> out) const {
  const std::size_t va = a_->dim, vb = b_->dim;
  detail::eval_psi_unit(*a_, unit, theta.subspan(0, va), out.subspan(0, va));
  detail::eval_psi_unit(*b_, unit, theta.subspan(va, vb), out.subspan(va, vb));
  out[va + vb] =
      theta[mu_a_index()] - theta[mu_b_index()] - theta[mu_diff_index()];
}

void StackedContrastSystem::psi_sum(std::span<const double> theta,
                                    std::span<double> out) const {
  const std::size_t va = a_->dim, vb = b_->dim;
  if (theta.size() != dim() || out.size() != dim()) {
    throw DimensionMismatch("psi_sum: theta/out length mismatch");
  }
  detail::eval_psi_sum(*a_, theta.subspan(0, va), out.subspan(0, va));
  detail::eval_psi_sum(*b_, theta.subspan(va, vb), out.subspan(va, vb));
  out[va + vb] =
      static_cast<double>(units()) *
      (theta[mu_a_index()] - theta[mu_b_index()] - theta[mu_diff_index()]);
}

void StackedContrastSystem::psi_columns(
    std::span<const double> theta,
    std::vector<std::vector<double>>& columns) const {
  allocate_columns(columns);
  const std::size_t va = a_->dim, vb = b_->dim;
  detail::eval_psi_columns(*a_, theta.subspan(0, va), columns, 0);
  detail::eval_psi_columns(*b_, theta.subspan(va, vb), columns, va);
  const double d =
      theta[mu_a_index()] - theta[mu_b_index()] - theta[mu_diff_index()];
  auto& last = columns[va + vb];
  for (auto& v : last) v = d;
}

double StackedContrastSystem::max_active_eta(
    std::span<const double> theta) const {
  const double ea = detail::max_active_eta(*a_, theta.subspan(0, a_->dim));
  const double eb =
      detail::max_active_eta(*b_, theta.subspan(a_->dim, b_->dim));
  return std::max(ea, eb);
}

}  // namespace icemest::gcomp
