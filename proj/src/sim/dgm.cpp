#include "icemest/sim/dgm.hpp"

#include "icemest/errors.hpp"
#include "icemest/simd/kernels.hpp"
#include "icemest/util/rng.hpp"

namespace icemest::sim {

namespace {

using simd::expit1;

double plan_branch(const data::TreatmentPlan& plan) {
  if (plan.kind() == data::TreatmentPlan::Kind::custom &&
      plan.values().size() != 3) {
    throw ConfigError("this mechanism has three treatment times");
  }
  return 0.0;
}

}  // namespace

DgmDraw draw_unit(std::uint64_t seed, std::uint64_t unit) {
  util::Rng rng(seed, unit);
  DgmDraw d{};

  // Fixed draw order; every branch of every variable is sampled so the
  // stream layout never depends on realized values.
  d.l0 = rng.bernoulli(0.5) ? 1.0 : 0.0;

  for (int a0 = 0; a0 < 2; ++a0) {
    d.y1[a0] =
        rng.bernoulli(expit1(-1.5 + 0.5 * a0 - 2.0 * d.l0)) ? 1.0 : 0.0;
  }
  for (int a0 = 0; a0 < 2; ++a0) {
    d.l1[a0] = rng.bernoulli(expit1(-1.0 - a0 + d.l0)) ? 1.0 : 0.0;
  }
  for (int a0 = 0; a0 < 2; ++a0) {
    for (int a1 = 0; a1 < 2; ++a1) {
      const double p = expit1(-1.5 + 0.1 * a0 + 1.2 * a1 - 0.5 * d.l0 -
                              2.0 * d.l1[a0]);
      d.y2[a0 * 2 + a1] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
  }
  for (int a0 = 0; a0 < 2; ++a0) {
    for (int a1 = 0; a1 < 2; ++a1) {
      const double p = expit1(-1.0 - 0.2 * a0 - a1 + 0.5 * d.l0 + d.l1[a0]);
      d.l2[a0 * 2 + a1] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
  }
  for (int a0 = 0; a0 < 2; ++a0) {
    for (int a1 = 0; a1 < 2; ++a1) {
      for (int a2 = 0; a2 < 2; ++a2) {
        const double p = expit1(-1.5 + 0.1 * a1 + 1.2 * a2 -
                                0.5 * d.l1[a0] - 2.0 * d.l2[a0 * 2 + a1]);
        d.y3[a0 * 4 + a1 * 2 + a2] = rng.bernoulli(p) ? 1.0 : 0.0;
      }
    }
  }

  d.a0 = rng.bernoulli(expit1(1.0 - 2.0 * d.l0)) ? 1.0 : 0.0;
  const int ia0 = static_cast<int>(d.a0);
  const double l1_obs = d.l1[ia0];
  d.a1 = rng.bernoulli(expit1(-1.0 - 0.2 * d.l0 - l1_obs + 1.75 * d.a0))
             ? 1.0
             : 0.0;
  const int ia1 = static_cast<int>(d.a1);
  const double l2_obs = d.l2[ia0 * 2 + ia1];
  d.a2 = rng.bernoulli(expit1(-1.0 - 0.2 * l1_obs - l2_obs + 1.75 * d.a1))
             ? 1.0
             : 0.0;

  // Censoring hazards consume one uniform each regardless of earlier
  // censoring, keeping the per-unit draw count constant.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  d.c1 = u1 < expit1(-2.5 - 0.5 * d.a0) ? 1.0 : 0.0;
  d.c2 = d.c1 == 1.0 ? 1.0 : (u2 < expit1(-2.5 - 0.5 * d.a1) ? 1.0 : 0.0);
  d.c3 = d.c2 == 1.0 ? 1.0 : (u3 < expit1(-2.5 - 0.5 * d.a2) ? 1.0 : 0.0);
  return d;
}

data::LongitudinalDataset generate(std::size_t n_units, std::uint64_t seed,
                                   const GenerateOptions& options) {
  constexpr int tau = 3;
  std::vector<double> l0(n_units), l1(n_units), l2(n_units);
  std::vector<double> a0(n_units), a1(n_units), a2(n_units);
  std::vector<double> c1(n_units, 0.0), c2(n_units, 0.0), c3(n_units, 0.0);
  std::vector<double> y1(n_units), y2(n_units), y3(n_units);

  for (std::size_t i = 0; i < n_units; ++i) {
    const DgmDraw d = draw_unit(seed, i);
    const int ia0 = static_cast<int>(d.a0);
    const int ia1 = static_cast<int>(d.a1);
    const int ia2 = static_cast<int>(d.a2);

    l0[i] = d.l0;
    a0[i] = d.a0;
    y1[i] = d.y1[ia0];
    l1[i] = d.l1[ia0];
    a1[i] = d.a1;
    y2[i] = d.y2[ia0 * 2 + ia1];
    l2[i] = d.l2[ia0 * 2 + ia1];
    a2[i] = d.a2;
    y3[i] = d.y3[ia0 * 4 + ia1 * 2 + ia2];

    if (options.censoring) {
      c1[i] = d.c1;
      c2[i] = d.c2;
      c3[i] = d.c3;
      if (d.c1 == 1.0) {
        y1[i] = data::kMissing;
        l1[i] = data::kMissing;
        a1[i] = data::kMissing;
      }
      if (d.c2 == 1.0) {
        y2[i] = data::kMissing;
        l2[i] = data::kMissing;
        a2[i] = data::kMissing;
      }
      if (d.c3 == 1.0) {
        y3[i] = data::kMissing;
      }
    }
  }

  data::LongitudinalDataset out(n_units, tau);
  out.add_covariate(0, "L", std::move(l0));
  out.set_treatment(0, std::move(a0));
  out.set_censoring(1, std::move(c1));
  out.set_outcome(1, std::move(y1));
  out.add_covariate(1, "L", std::move(l1));
  out.set_treatment(1, std::move(a1));
  out.set_censoring(2, std::move(c2));
  out.set_outcome(2, std::move(y2));
  out.add_covariate(2, "L", std::move(l2));
  out.set_treatment(2, std::move(a2));
  out.set_censoring(3, std::move(c3));
  out.set_outcome(3, std::move(y3));
  return out;
}

double true_value(const data::TreatmentPlan& plan, std::size_t sample_size,
                  std::uint64_t seed) {
  plan_branch(plan);
  if (sample_size == 0) {
    throw ConfigError("true_value needs a positive sample size");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < sample_size; ++i) {
    const DgmDraw d = draw_unit(seed, i);
    int ia0, ia1, ia2;
    if (plan.deterministic()) {
      ia0 = static_cast<int>(plan.assigned(0));
      ia1 = static_cast<int>(plan.assigned(1));
      ia2 = static_cast<int>(plan.assigned(2));
    } else {
      ia0 = static_cast<int>(d.a0);
      ia1 = static_cast<int>(d.a1);
      ia2 = static_cast<int>(d.a2);
    }
    acc += d.y3[ia0 * 4 + ia1 * 2 + ia2];
  }
  return acc / static_cast<double>(sample_size);
}

double true_value_exact(const data::TreatmentPlan& plan) {
  plan_branch(plan);
  if (!plan.deterministic()) {
    throw ConfigError("exact truth is implemented for deterministic plans");
  }
  const double a0 = plan.assigned(0);
  const double a1 = plan.assigned(1);
  const double a2 = plan.assigned(2);

  double total = 0.0;
  for (int l0 = 0; l0 < 2; ++l0) {
    const double p_l0 = 0.5;
    for (int l1 = 0; l1 < 2; ++l1) {
      const double q1 = expit1(-1.0 - a0 + l0);
      const double p_l1 = l1 ? q1 : 1.0 - q1;
      for (int l2 = 0; l2 < 2; ++l2) {
        const double q2 = expit1(-1.0 - 0.2 * a0 - a1 + 0.5 * l0 + l1);
        const double p_l2 = l2 ? q2 : 1.0 - q2;
        const double p_y3 =
            expit1(-1.5 + 0.1 * a1 + 1.2 * a2 - 0.5 * l1 - 2.0 * l2);
        total += p_l0 * p_l1 * p_l2 * p_y3;
      }
    }
  }
  return total;
}

}  // namespace icemest::sim
