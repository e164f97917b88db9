#pragma once

#include <Eigen/Dense>
#include <utility>

#include "icemest/mest/system.hpp"

namespace icemest::mest {

// Bread: B_n = (1/n) sum_i { -d psi(O_i; theta)/d theta } evaluated at the
// root, i.e. -(numerical jacobian)/n.
Eigen::MatrixXd bread_matrix(const EstimatingSystem& system,
                             const Eigen::VectorXd& theta_hat,
                             double fd_relative_step = 1e-6);

// Meat: F_n = (1/n) sum_i psi psi^T at the root.  Symmetric by construction
// (the upper triangle is computed once and mirrored).
Eigen::MatrixXd meat_matrix(const EstimatingSystem& system,
                            const Eigen::VectorXd& theta_hat);

struct SandwichResult {
  Eigen::MatrixXd covariance;       // B^-1 F B^-T
  Eigen::VectorXd standard_errors;  // sqrt(diag(covariance) / n)
  double bread_rcond = 0.0;
};

// Throws SingularBread when the bread's reciprocal condition number (from
// SVD) falls below rcond_min.
SandwichResult sandwich_variance(const Eigen::MatrixXd& bread,
                                 const Eigen::MatrixXd& meat,
                                 std::size_t n_units,
                                 double rcond_min = 1e-12);

// Two-sided normal interval; level in (0, 1), e.g. 0.95.
std::pair<double, double> wald_ci(double estimate, double se, double level);

}  // namespace icemest::mest
