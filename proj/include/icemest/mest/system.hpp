#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace icemest::mest {

// A v-dimensional estimating function over n independent units: the
// estimator solves sum_i psi(O_i; theta) = 0.  Implementations must be
// const-thread-safe: no mutable state touched by psi/psi_sum/psi_columns,
// so one instance can serve concurrent callers.
class EstimatingSystem {
 public:
  EstimatingSystem(std::size_t n_units, std::size_t dim)
      : n_(n_units), v_(dim) {}
  virtual ~EstimatingSystem() = default;

  std::size_t units() const { return n_; }
  std::size_t dim() const { return v_; }

  // Per-unit contribution; out has length dim().
  virtual void psi(std::size_t unit, std::span<const double> theta,
                   std::span<double> out) const = 0;

  // sum_i psi(O_i; theta).  The default accumulates psi unit by unit;
  // systems with vectorized structure override it.
  virtual void psi_sum(std::span<const double> theta,
                       std::span<double> out) const;

  // All per-unit values, column-major: columns[j][i] = psi_j(O_i; theta).
  // Each column must already be sized to units().
  virtual void psi_columns(std::span<const double> theta,
                           std::vector<std::vector<double>>& columns) const;

  // Resizes `columns` to dim() vectors of length units().
  void allocate_columns(std::vector<std::vector<double>>& columns) const;

 private:
  std::size_t n_;
  std::size_t v_;
};

// Adapter for ad-hoc systems (tests, small estimators): one callable
// evaluated per unit.
class FunctionSystem final : public EstimatingSystem {
 public:
  using PsiFn = std::function<void(std::size_t unit,
                                   std::span<const double> theta,
                                   std::span<double> out)>;
  FunctionSystem(std::size_t n_units, std::size_t dim, PsiFn fn)
      : EstimatingSystem(n_units, dim), fn_(std::move(fn)) {}

  void psi(std::size_t unit, std::span<const double> theta,
           std::span<double> out) const override {
    fn_(unit, theta, out);
  }

 private:
  PsiFn fn_;
};

}  // namespace icemest::mest
