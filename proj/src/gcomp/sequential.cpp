#include "icemest/gcomp/sequential.hpp"

#include <algorithm>
#include <cmath>

#include "icemest/simd/kernels.hpp"

namespace icemest::gcomp {

namespace {

struct BlockEval {
  std::vector<double> eta, p, r, w;
  // score_j = sum_i r_i x_ij; max-norm scaled by 1/n_units
  double score_norm = 0.0;
  double max_active_eta = 0.0;
};

void evaluate(const IceBlock& block, const std::vector<double>& target,
              const Eigen::VectorXd& beta, double inv_n, BlockEval& ev,
              Eigen::VectorXd& score) {
  const std::size_t n = block.fit_mask.size();
  ev.eta.assign(n, 0.0);
  for (std::size_t j = 0; j < block.ncols; ++j) {
    simd::axpy(beta[static_cast<Eigen::Index>(j)], block.x.col(j), ev.eta);
  }
  ev.p.resize(n);
  simd::expit(ev.eta, ev.p);
  ev.r.resize(n);
  simd::residual(target, ev.p, block.fit_mask, ev.r);
  score.resize(static_cast<Eigen::Index>(block.ncols));
  ev.score_norm = 0.0;
  for (std::size_t j = 0; j < block.ncols; ++j) {
    const double s = simd::dot(ev.r, block.x.col(j));
    score[static_cast<Eigen::Index>(j)] = s;
    ev.score_norm = std::max(ev.score_norm, std::fabs(s) * inv_n);
  }
  ev.max_active_eta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (block.fit_mask[i] == 1.0) {
      ev.max_active_eta = std::max(ev.max_active_eta, std::fabs(ev.eta[i]));
    }
  }
}

}  // namespace

SequentialFit sequential_fit(const IcePrepared& prep, const IceConfig& config) {
  const std::size_t n = prep.n;
  const double inv_n = 1.0 / static_cast<double>(n);
  SequentialFit fit;
  fit.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(prep.dim));

  auto fail = [&](int time, std::string reason, bool separation) {
    fit.ok = false;
    fit.fail_time = time;
    fit.failure_reason = std::move(reason) + " at time " +
                         std::to_string(time);
    fit.separation = separation;
    return fit;
  };

  std::vector<double> target = prep.y_final;
  BlockEval ev;
  Eigen::VectorXd score;

  for (int k = prep.tau - 1; k >= 0; --k) {
    const IceBlock& block = prep.block_at_time(k);
    const std::size_t m = block.ncols;

    if (simd::sum(block.fit_mask) == 0.0) {
      return fail(k, "empty fitting stratum", false);
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    evaluate(block, target, beta, inv_n, ev, score);

    bool converged = false;
    for (int iter = 0; iter < config.irls_max_iterations; ++iter) {
      if (ev.max_active_eta > config.separation_eta) {
        return fail(k, "separation (unbounded linear predictor)", true);
      }
      if (ev.score_norm <= config.irls_tolerance) {
        converged = true;
        break;
      }

      ev.w.resize(n);
      simd::logit_weight(ev.p, block.fit_mask, ev.w);
      Eigen::MatrixXd gram(m, m);
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = j; l < m; ++l) {
          const double g = simd::wdot(ev.w, block.x.col(j), block.x.col(l));
          gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = g;
          gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = g;
        }
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
      if (!lu.isInvertible()) {
        return fail(k, "singular weighted information", false);
      }
      const Eigen::VectorXd delta = lu.solve(score);
      if (!delta.allFinite()) {
        return fail(k, "singular weighted information", false);
      }

      // Step-halving keeps the update inside the region where the score
      // norm decreases.
      const double previous = ev.score_norm;
      double lambda = 1.0;
      bool accepted = false;
      for (int half = 0; half < 25; ++half) {
        const Eigen::VectorXd trial = beta + lambda * delta;
        evaluate(block, target, trial, inv_n, ev, score);
        if (std::isfinite(ev.score_norm) && ev.score_norm < previous) {
          beta = trial;
          accepted = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!accepted) {
        return fail(k, "no descent step", false);
      }
    }
    if (!converged) {
      if (ev.max_active_eta > config.separation_eta) {
        return fail(k, "separation (unbounded linear predictor)", true);
      }
      return fail(k, "sequential regression did not converge", false);
    }

    for (std::size_t j = 0; j < m; ++j) {
      fit.theta[static_cast<Eigen::Index>(block.offset + j)] =
          beta[static_cast<Eigen::Index>(j)];
    }

    // Plan-side predictions become the next (earlier) block's target.
    std::vector<double> etastar(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      simd::axpy(beta[static_cast<Eigen::Index>(j)], block.xstar.col(j),
                 etastar);
    }
    std::vector<double> pred(n);
    simd::expit(etastar, pred);
    if (prep.outcome == OutcomeKind::time_to_event && k >= 1) {
      const auto& y_prev = prep.y_carry[std::size_t(k - 1)];
      for (std::size_t i = 0; i < n; ++i) {
        if (y_prev[i] == 1.0) pred[i] = 1.0;
      }
    }
    target = std::move(pred);
  }

  fit.mu = simd::sum(target) * inv_n;
  fit.theta[static_cast<Eigen::Index>(prep.mu_index)] = fit.mu;
  fit.predictions_t0 = std::move(target);
  fit.ok = true;
  return fit;
}

}  // namespace icemest::gcomp
