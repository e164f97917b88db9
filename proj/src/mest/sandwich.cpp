#include "icemest/mest/sandwich.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "icemest/errors.hpp"
#include "icemest/mest/solver.hpp"
#include "icemest/simd/kernels.hpp"
#include "icemest/util/stats.hpp"

namespace icemest::mest {

Eigen::MatrixXd bread_matrix(const EstimatingSystem& system,
                             const Eigen::VectorXd& theta_hat,
                             double fd_relative_step) {
  const double n = static_cast<double>(system.units());
  return -numerical_jacobian(system, theta_hat, fd_relative_step) / n;
}

Eigen::MatrixXd meat_matrix(const EstimatingSystem& system,
                            const Eigen::VectorXd& theta_hat) {
  const std::size_t v = system.dim();
  const double n = static_cast<double>(system.units());
  std::vector<std::vector<double>> cols;
  system.psi_columns({theta_hat.data(), v}, cols);
  Eigen::MatrixXd meat(v, v);
  for (std::size_t j = 0; j < v; ++j) {
    for (std::size_t k = j; k < v; ++k) {
      const double value = simd::dot(cols[j], cols[k]) / n;
      meat(j, k) = value;
      meat(k, j) = value;
    }
  }
  return meat;
}

SandwichResult sandwich_variance(const Eigen::MatrixXd& bread,
                                 const Eigen::MatrixXd& meat,
                                 std::size_t n_units, double rcond_min) {
  if (bread.rows() != bread.cols() || meat.rows() != meat.cols() ||
      bread.rows() != meat.rows()) {
    throw DimensionMismatch("sandwich_variance: bread/meat shape mismatch");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      bread, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double rcond = smax > 0.0 ? smin / smax : 0.0;
  if (!(rcond >= rcond_min)) {
    throw SingularBread(rcond);
  }

  // B^-1 F B^-T via two solves.
  const Eigen::MatrixXd binv_f = svd.solve(meat);
  const Eigen::MatrixXd covariance = svd.solve(binv_f.transpose()).transpose();

  SandwichResult result;
  result.covariance = covariance;
  result.bread_rcond = rcond;
  const Eigen::Index v = covariance.rows();
  result.standard_errors.resize(v);
  const double n = static_cast<double>(n_units);
  for (Eigen::Index j = 0; j < v; ++j) {
    // The diagonal is non-negative in exact arithmetic; clamp rounding dust.
    result.standard_errors[j] = std::sqrt(std::max(0.0, covariance(j, j)) / n);
  }
  return result;
}

std::pair<double, double> wald_ci(double estimate, double se, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("wald_ci: level must lie in (0, 1)");
  }
  if (se < 0.0) {
    throw std::invalid_argument("wald_ci: negative standard error");
  }
  const double z = util::normal_quantile(0.5 + 0.5 * level);
  return {estimate - z * se, estimate + z * se};
}

}  // namespace icemest::mest
