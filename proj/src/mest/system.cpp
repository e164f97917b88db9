#include "icemest/mest/system.hpp"

#include <algorithm>

#include "icemest/errors.hpp"

namespace icemest::mest {

void EstimatingSystem::psi_sum(std::span<const double> theta,
                               std::span<double> out) const {
  if (theta.size() != v_ || out.size() != v_) {
    throw DimensionMismatch("psi_sum: theta/out length must equal dim()");
  }
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> row(v_);
  for (std::size_t i = 0; i < n_; ++i) {
    psi(i, theta, row);
    for (std::size_t j = 0; j < v_; ++j) out[j] += row[j];
  }
}

void EstimatingSystem::psi_columns(
    std::span<const double> theta,
    std::vector<std::vector<double>>& columns) const {
  allocate_columns(columns);
  std::vector<double> row(v_);
  for (std::size_t i = 0; i < n_; ++i) {
    psi(i, theta, row);
    for (std::size_t j = 0; j < v_; ++j) columns[j][i] = row[j];
  }
}

void EstimatingSystem::allocate_columns(
    std::vector<std::vector<double>>& columns) const {
  columns.resize(v_);
  for (auto& col : columns) col.assign(n_, 0.0);
}

}  // namespace icemest::mest
