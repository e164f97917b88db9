#pragma once

#include <Eigen/Dense>
#include <string>

#include "icemest/mest/system.hpp"

namespace icemest::mest {

struct SolveConfig {
  int max_iterations = 10000;
  // Convergence: max-norm of the mean estimating equation (1/n) sum_i psi.
  double root_tolerance = 1e-9;
  // Central differences with h_j = step * max(1, |theta_j|).
  double fd_relative_step = 1e-6;
  int max_step_halvings = 30;
  // Abort when the iterate runs away; logistic parameters this large mean
  // separation, not a root.
  double theta_guard = 1e8;
};

enum class SolveStatus {
  converged,
  max_iterations_reached,
  singular_jacobian,
  line_search_stalled,
  non_finite,
  diverged,
};

std::string to_string(SolveStatus s);

struct SolveResult {
  Eigen::VectorXd theta;
  SolveStatus status = SolveStatus::max_iterations_reached;
  int iterations = 0;
  // Max-norm of the mean estimating equation at theta.
  double residual_norm = 0.0;
  bool converged() const { return status == SolveStatus::converged; }
};

// Damped Newton-Raphson on the mean estimating equation: full step first,
// halved until the residual max-norm decreases.
SolveResult solve_estimating_equations(const EstimatingSystem& system,
                                       const Eigen::VectorXd& init,
                                       const SolveConfig& config = {});

// Jacobian of the *summed* estimating equation by central differences,
// J(j,k) = d(sum_i psi_j)/d(theta_k).  Throws NonFiniteEvaluation if any
// probe produces a non-finite value.
Eigen::MatrixXd numerical_jacobian(const EstimatingSystem& system,
                                   const Eigen::VectorXd& theta,
                                   double fd_relative_step = 1e-6);

}  // namespace icemest::mest
