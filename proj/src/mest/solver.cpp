#include "icemest/mest/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "icemest/errors.hpp"

namespace icemest::mest {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations_reached: return "max iterations reached";
    case SolveStatus::singular_jacobian: return "singular jacobian";
    case SolveStatus::line_search_stalled: return "line search stalled";
    case SolveStatus::non_finite: return "non-finite evaluation";
    case SolveStatus::diverged: return "iterate diverged";
  }
  return "unknown";
}

namespace {

Eigen::VectorXd mean_psi(const EstimatingSystem& system,
                         const Eigen::VectorXd& theta) {
  const std::size_t v = system.dim();
  Eigen::VectorXd out(v);
  system.psi_sum({theta.data(), v}, {out.data(), v});
  return out / static_cast<double>(system.units());
}

}  // namespace

Eigen::MatrixXd numerical_jacobian(const EstimatingSystem& system,
                                   const Eigen::VectorXd& theta,
                                   double fd_relative_step) {
  const std::size_t v = system.dim();
  if (static_cast<std::size_t>(theta.size()) != v) {
    throw DimensionMismatch("numerical_jacobian: theta length != dim()");
  }
  Eigen::MatrixXd jac(v, v);
  Eigen::VectorXd probe = theta;
  Eigen::VectorXd fp(v), fm(v);
  for (std::size_t k = 0; k < v; ++k) {
    const double base = theta[k];
    const double h = fd_relative_step * std::max(1.0, std::fabs(base));
    const double hi = base + h;
    const double lo = base - h;
    probe[k] = hi;
    system.psi_sum({probe.data(), v}, {fp.data(), v});
    probe[k] = lo;
    system.psi_sum({probe.data(), v}, {fm.data(), v});
    probe[k] = base;
    // Denominator uses the floating-point spread actually applied.
    const double denom = hi - lo;
    for (std::size_t j = 0; j < v; ++j) {
      const double d = (fp[j] - fm[j]) / denom;
      if (!std::isfinite(d)) {
        throw NonFiniteEvaluation(
            "numerical_jacobian: non-finite derivative at column " +
            std::to_string(k));
      }
      jac(j, k) = d;
    }
  }
  return jac;
}

SolveResult solve_estimating_equations(const EstimatingSystem& system,
                                       const Eigen::VectorXd& init,
                                       const SolveConfig& config) {
  const std::size_t v = system.dim();
  if (static_cast<std::size_t>(init.size()) != v) {
    throw DimensionMismatch("solve_estimating_equations: init length != dim()");
  }
  const double n = static_cast<double>(system.units());

  SolveResult result;
  result.theta = init;

  Eigen::VectorXd f = mean_psi(system, result.theta);
  if (!f.allFinite()) {
    result.status = SolveStatus::non_finite;
    result.residual_norm = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  double rn = f.lpNorm<Eigen::Infinity>();

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (rn <= config.root_tolerance) {
      result.status = SolveStatus::converged;
      result.residual_norm = rn;
      return result;
    }

    Eigen::MatrixXd jac;
    try {
      jac = numerical_jacobian(system, result.theta, config.fd_relative_step) /
            n;
    } catch (const NonFiniteEvaluation&) {
      result.status = SolveStatus::non_finite;
      result.residual_norm = rn;
      return result;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) {
      result.status = SolveStatus::singular_jacobian;
      result.residual_norm = rn;
      return result;
    }
    const Eigen::VectorXd step = lu.solve(-f);
    if (!step.allFinite()) {
      result.status = SolveStatus::singular_jacobian;
      result.residual_norm = rn;
      return result;
    }

    // Step-halving line search on the residual max-norm.
    bool accepted = false;
    double lambda = 1.0;
    for (int half = 0; half <= config.max_step_halvings; ++half) {
      const Eigen::VectorXd trial = result.theta + lambda * step;
      const Eigen::VectorXd ft = mean_psi(system, trial);
      if (ft.allFinite() && ft.lpNorm<Eigen::Infinity>() < rn) {
        result.theta = trial;
        f = ft;
        rn = ft.lpNorm<Eigen::Infinity>();
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    result.iterations = iter + 1;
    if (!accepted) {
      result.status = SolveStatus::line_search_stalled;
      result.residual_norm = rn;
      return result;
    }
    if (result.theta.lpNorm<Eigen::Infinity>() > config.theta_guard) {
      result.status = SolveStatus::diverged;
      result.residual_norm = rn;
      return result;
    }
  }

  result.status = rn <= config.root_tolerance
                      ? SolveStatus::converged
                      : SolveStatus::max_iterations_reached;
  result.residual_norm = rn;
  return result;
}

}  // namespace icemest::mest
