#include "icemest/gcomp/prepare.hpp"

#include <string>

#include "icemest/errors.hpp"

namespace icemest::gcomp {

IcePrepared prepare_ice(const data::LongitudinalDataset& data,
                        const data::TreatmentPlan& plan,
                        const IceConfig& config) {
  data.validate();
  const int tau = data.horizon();
  const std::size_t n = data.units();

  if (plan.kind() == data::TreatmentPlan::Kind::custom &&
      plan.values().size() != static_cast<std::size_t>(tau)) {
    throw ConfigError("custom plan length " +
                      std::to_string(plan.values().size()) +
                      " does not match horizon " + std::to_string(tau));
  }

  std::vector<data::DesignSpec> specs = config.design;
  if (specs.empty()) {
    for (int k = 0; k < tau; ++k) {
      specs.push_back(config.stratified
                          ? data::DesignSpec::covariate_history(data, k)
                          : data::DesignSpec::full_history(data, k));
    }
  }
  if (specs.size() != static_cast<std::size_t>(tau)) {
    throw ConfigError("need one design spec per time 0.." +
                      std::to_string(tau - 1) + ", got " +
                      std::to_string(specs.size()));
  }
  if (config.stratified) {
    for (int k = 0; k < tau; ++k) {
      if (specs[std::size_t(k)].has_treatment_term()) {
        throw ConfigError(
            "stratified designs cannot include treatment terms: treatment "
            "is constant inside the follower stratum (time " +
            std::to_string(k) + ")");
      }
    }
  }

  IcePrepared prep;
  prep.n = n;
  prep.tau = tau;
  prep.stratified = config.stratified;
  prep.outcome = config.outcome;
  prep.plan = plan;

  // Column widths first so offsets can follow the (beta_{tau-1},...,beta_0)
  // layout.
  std::vector<std::size_t> widths(static_cast<std::size_t>(tau));
  for (int k = 0; k < tau; ++k) {
    widths[std::size_t(k)] = specs[std::size_t(k)].column_count();
    if (widths[std::size_t(k)] == 0) {
      throw ConfigError("design at time " + std::to_string(k) +
                        " has no columns");
    }
  }
  std::size_t total = 0;
  for (auto w : widths) total += w;
  prep.dim = total + 1;
  prep.mu_index = total;

  prep.blocks.resize(static_cast<std::size_t>(tau));
  std::size_t offset = 0;
  for (int k = tau - 1; k >= 0; --k) {
    IceBlock& block = prep.blocks[std::size_t(k)];
    block.time = k;
    block.offset = offset;
    block.ncols = widths[std::size_t(k)];
    offset += block.ncols;
  }

  for (int k = 0; k < tau; ++k) {
    IceBlock& block = prep.blocks[std::size_t(k)];
    const auto& spec = specs[std::size_t(k)];
    block.x = data::design_matrix(data, k, spec, nullptr);
    block.xstar = data::design_matrix(data, k, spec, &plan);

    block.fit_mask = data.uncensored_mask(k + 1);
    if (config.stratified) {
      const auto followers = data::followers_mask(data, plan, k);
      for (std::size_t i = 0; i < n; ++i) block.fit_mask[i] *= followers[i];
    }
  }

  auto zero_filled = [](const std::vector<double>& src) {
    std::vector<double> out(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      out[i] = data::is_missing(src[i]) ? 0.0 : src[i];
    }
    return out;
  };
  prep.y_final = zero_filled(data.outcome(tau));

  if (config.outcome == OutcomeKind::time_to_event) {
    // Event indicators must be 0/1 and absorbing among observed values.
    for (int k = 1; k <= tau; ++k) {
      const auto& y = data.outcome(k);
      for (std::size_t i = 0; i < n; ++i) {
        if (!data::is_missing(y[i]) && y[i] != 0.0 && y[i] != 1.0) {
          throw ValidationError(i, k,
                                "time-to-event outcome must be 0 or 1");
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      bool seen = false;
      for (int k = 1; k <= tau; ++k) {
        const double y = data.outcome(k)[i];
        if (data::is_missing(y)) continue;
        if (seen && y == 0.0) throw EventNonMonotone(i, k);
        if (y == 1.0) seen = true;
      }
    }
    for (int k = 1; k < tau; ++k) {
      prep.y_carry.push_back(zero_filled(data.outcome(k)));
    }
  }

  return prep;
}

}  // namespace icemest::gcomp
