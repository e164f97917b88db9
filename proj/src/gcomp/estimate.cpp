#include "icemest/gcomp/estimate.hpp"

#include <memory>
#include <utility>

#include "icemest/errors.hpp"
#include "icemest/gcomp/sequential.hpp"
#include "icemest/gcomp/system_ice.hpp"
#include "icemest/mest/sandwich.hpp"
#include "icemest/mest/solver.hpp"
#include "icemest/simd/kernels.hpp"

namespace icemest::gcomp {

namespace {

// Empty fitting stratum at some time -> no root exists; reported as a
// convergence failure, not an exception, so simulation loops can count it.
std::string empty_stratum_reason(const IcePrepared& prep) {
  for (int k = 0; k < prep.tau; ++k) {
    if (simd::sum(prep.block_at_time(k).fit_mask) == 0.0) {
      return "empty fitting stratum at time " + std::to_string(k);
    }
  }
  return {};
}

Eigen::VectorXd cold_start(const IcePrepared& prep) {
  Eigen::VectorXd init =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(prep.dim));
  init[static_cast<Eigen::Index>(prep.mu_index)] = 0.5;
  return init;
}

void fill_layout(EstimateResult& result, const IcePrepared& prep) {
  for (const auto& block : prep.blocks) {
    result.block_times.push_back(block.time);
    result.block_offsets.push_back(block.offset);
    result.block_sizes.push_back(block.ncols);
  }
  result.mu_index = prep.mu_index;
}

}  // namespace

EstimateResult estimate(const data::LongitudinalDataset& data,
                        const data::TreatmentPlan& plan,
                        const IceConfig& config) {
  auto prep = std::make_shared<const IcePrepared>(
      prepare_ice(data, plan, config));

  EstimateResult result;
  fill_layout(result, *prep);

  if (auto reason = empty_stratum_reason(*prep); !reason.empty()) {
    result.failure_reason = reason;
    return result;
  }

  const SequentialFit seq = sequential_fit(*prep, config);
  Eigen::VectorXd init;
  if (seq.ok) {
    init = seq.theta;
  } else if (seq.separation) {
    result.failure_reason = seq.failure_reason;
    return result;
  } else {
    // The sequential path stalled for a reason other than separation; give
    // the damped solver a chance from a neutral start.
    init = cold_start(*prep);
  }

  IceSystem system(prep);
  const mest::SolveResult solved =
      mest::solve_estimating_equations(system, init, config.solve);
  result.iterations = solved.iterations;
  result.residual_norm = solved.residual_norm;
  if (!solved.converged()) {
    result.failure_reason = mest::to_string(solved.status);
    return result;
  }
  if (system.max_active_eta({solved.theta.data(),
                             static_cast<std::size_t>(solved.theta.size())}) >
      config.separation_eta) {
    result.failure_reason = "separation (unbounded linear predictor)";
    return result;
  }

  mest::SandwichResult sandwich;
  try {
    const Eigen::MatrixXd bread = mest::bread_matrix(
        system, solved.theta, config.solve.fd_relative_step);
    const Eigen::MatrixXd meat = mest::meat_matrix(system, solved.theta);
    sandwich = mest::sandwich_variance(bread, meat, prep->n);
  } catch (const SingularBread& err) {
    result.failure_reason = err.what();
    return result;
  }

  result.converged = true;
  result.theta = solved.theta;
  result.covariance = sandwich.covariance;
  result.mu_hat = solved.theta[static_cast<Eigen::Index>(prep->mu_index)];
  result.se =
      sandwich.standard_errors[static_cast<Eigen::Index>(prep->mu_index)];
  const auto ci = mest::wald_ci(result.mu_hat, result.se, config.level);
  result.ci_lower = ci.first;
  result.ci_upper = ci.second;
  return result;
}

ContrastResult estimate_contrast(const data::LongitudinalDataset& data,
                                 const data::TreatmentPlan& plan_a,
                                 const data::TreatmentPlan& plan_b,
                                 const IceConfig& config) {
  auto prep_a = std::make_shared<const IcePrepared>(
      prepare_ice(data, plan_a, config));
  auto prep_b = std::make_shared<const IcePrepared>(
      prepare_ice(data, plan_b, config));

  ContrastResult result;

  for (const auto* prep : {prep_a.get(), prep_b.get()}) {
    if (auto reason = empty_stratum_reason(*prep); !reason.empty()) {
      result.failure_reason = reason + " (plan " + prep->plan.label() + ")";
      return result;
    }
  }

  StackedContrastSystem system(prep_a, prep_b);
  const std::size_t dim = system.dim();

  const SequentialFit seq_a = sequential_fit(*prep_a, config);
  const SequentialFit seq_b = sequential_fit(*prep_b, config);
  for (const auto* seq : {&seq_a, &seq_b}) {
    if (!seq->ok && seq->separation) {
      result.failure_reason = seq->failure_reason;
      return result;
    }
  }

  Eigen::VectorXd init = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  if (seq_a.ok) {
    init.segment(0, static_cast<Eigen::Index>(prep_a->dim)) = seq_a.theta;
  } else {
    init.segment(0, static_cast<Eigen::Index>(prep_a->dim)) =
        cold_start(*prep_a);
  }
  if (seq_b.ok) {
    init.segment(static_cast<Eigen::Index>(prep_a->dim),
                 static_cast<Eigen::Index>(prep_b->dim)) = seq_b.theta;
  } else {
    init.segment(static_cast<Eigen::Index>(prep_a->dim),
                 static_cast<Eigen::Index>(prep_b->dim)) = cold_start(*prep_b);
  }
  init[static_cast<Eigen::Index>(system.mu_diff_index())] =
      init[static_cast<Eigen::Index>(system.mu_a_index())] -
      init[static_cast<Eigen::Index>(system.mu_b_index())];

  const mest::SolveResult solved =
      mest::solve_estimating_equations(system, init, config.solve);
  result.iterations = solved.iterations;
  result.residual_norm = solved.residual_norm;
  if (!solved.converged()) {
    result.failure_reason = mest::to_string(solved.status);
    return result;
  }
  if (system.max_active_eta({solved.theta.data(),
                             static_cast<std::size_t>(solved.theta.size())}) >
      config.separation_eta) {
    result.failure_reason = "separation (unbounded linear predictor)";
    return result;
  }

  mest::SandwichResult sandwich;
  try {
    const Eigen::MatrixXd bread = mest::bread_matrix(
        system, solved.theta, config.solve.fd_relative_step);
    const Eigen::MatrixXd meat = mest::meat_matrix(system, solved.theta);
    sandwich = mest::sandwich_variance(bread, meat, data.units());
  } catch (const SingularBread& err) {
    result.failure_reason = err.what();
    return result;
  }

  auto extract = [&](std::size_t index) {
    IntervalEstimate est;
    est.estimate = solved.theta[static_cast<Eigen::Index>(index)];
    est.se = sandwich.standard_errors[static_cast<Eigen::Index>(index)];
    const auto ci = mest::wald_ci(est.estimate, est.se, config.level);
    est.ci_lower = ci.first;
    est.ci_upper = ci.second;
    return est;
  };
  result.plan_a = extract(system.mu_a_index());
  result.plan_b = extract(system.mu_b_index());
  result.difference = extract(system.mu_diff_index());
  result.converged = true;
  return result;
}

}  // namespace icemest::gcomp
