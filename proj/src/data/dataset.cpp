#include "icemest/data/dataset.hpp"

#include <stdexcept>

#include "icemest/errors.hpp"

namespace icemest::data {

LongitudinalDataset::LongitudinalDataset(std::size_t n_units, int tau)
    : n_(n_units), tau_(tau) {
  if (tau < 1) throw ConfigError("dataset horizon must be at least 1");
  treatments_.assign(static_cast<std::size_t>(tau), {});
  censoring_.assign(static_cast<std::size_t>(tau), {});
  outcomes_.assign(static_cast<std::size_t>(tau), {});
  covariates_.assign(static_cast<std::size_t>(tau), {});
}

std::vector<double>& LongitudinalDataset::slot(
    std::vector<std::vector<double>>& store, int time, int lo, int hi,
    const char* what) {
  if (time < lo || time > hi) {
    throw std::out_of_range(std::string(what) + ": time " +
                            std::to_string(time) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) +
                            "]");
  }
  return store[static_cast<std::size_t>(time - lo)];
}

const std::vector<double>& LongitudinalDataset::slot(
    const std::vector<std::vector<double>>& store, int time, int lo, int hi,
    const char* what) const {
  if (time < lo || time > hi) {
    throw std::out_of_range(std::string(what) + ": time " +
                            std::to_string(time) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) +
                            "]");
  }
  return store[static_cast<std::size_t>(time - lo)];
}

void LongitudinalDataset::set_treatment(int time, std::vector<double> values) {
  if (values.size() != n_) {
    throw DimensionMismatch("set_treatment: length != units()");
  }
  slot(treatments_, time, 0, tau_ - 1, "treatment") = std::move(values);
}

const std::vector<double>& LongitudinalDataset::treatment(int time) const {
  return slot(treatments_, time, 0, tau_ - 1, "treatment");
}

void LongitudinalDataset::set_censoring(int time, std::vector<double> values) {
  if (values.size() != n_) {
    throw DimensionMismatch("set_censoring: length != units()");
  }
  slot(censoring_, time, 1, tau_, "censoring") = std::move(values);
}

const std::vector<double>& LongitudinalDataset::censoring(int time) const {
  return slot(censoring_, time, 1, tau_, "censoring");
}

void LongitudinalDataset::set_outcome(int time, std::vector<double> values) {
  if (values.size() != n_) {
    throw DimensionMismatch("set_outcome: length != units()");
  }
  slot(outcomes_, time, 1, tau_, "outcome") = std::move(values);
}

const std::vector<double>& LongitudinalDataset::outcome(int time) const {
  return slot(outcomes_, time, 1, tau_, "outcome");
}

void LongitudinalDataset::add_covariate(int time, std::string name,
                                        std::vector<double> values) {
  if (values.size() != n_) {
    throw DimensionMismatch("add_covariate: length != units()");
  }
  if (time < 0 || time > tau_ - 1) {
    throw std::out_of_range("covariate: time out of range");
  }
  auto& cols = covariates_[static_cast<std::size_t>(time)];
  for (auto& col : cols) {
    if (col.name == name) {
      col.values = std::move(values);
      return;
    }
  }
  cols.push_back(Column{std::move(name), std::move(values)});
}

const std::vector<double>& LongitudinalDataset::covariate(
    int time, const std::string& name) const {
  if (time < 0 || time > tau_ - 1) {
    throw std::out_of_range("covariate: time out of range");
  }
  for (const auto& col : covariates_[static_cast<std::size_t>(time)]) {
    if (col.name == name) return col.values;
  }
  throw MissingColumn("L" + std::to_string(time) + "_" + name);
}

bool LongitudinalDataset::has_covariate(int time,
                                        const std::string& name) const {
  if (time < 0 || time > tau_ - 1) return false;
  for (const auto& col : covariates_[static_cast<std::size_t>(time)]) {
    if (col.name == name) return true;
  }
  return false;
}

std::vector<std::string> LongitudinalDataset::covariate_names(int time) const {
  if (time < 0 || time > tau_ - 1) {
    throw std::out_of_range("covariate_names: time out of range");
  }
  std::vector<std::string> names;
  for (const auto& col : covariates_[static_cast<std::size_t>(time)]) {
    names.push_back(col.name);
  }
  return names;
}

std::vector<double> LongitudinalDataset::uncensored_mask(int time) const {
  if (time == 0) return std::vector<double>(n_, 1.0);
  const auto& c = censoring(time);
  std::vector<double> mask(n_);
  for (std::size_t i = 0; i < n_; ++i) mask[i] = c[i] == 0.0 ? 1.0 : 0.0;
  return mask;
}

LongitudinalDataset LongitudinalDataset::select_units(
    std::span<const std::size_t> indices) const {
  LongitudinalDataset out(indices.size(), tau_);
  auto pick = [&](const std::vector<double>& src) {
    std::vector<double> dst(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (indices[i] >= n_) {
        throw std::out_of_range("select_units: index out of range");
      }
      dst[i] = src[indices[i]];
    }
    return dst;
  };
  for (int k = 0; k < tau_; ++k) {
    out.set_treatment(k, pick(treatment(k)));
    for (const auto& col : covariates_[static_cast<std::size_t>(k)]) {
      out.add_covariate(k, col.name, pick(col.values));
    }
  }
  for (int k = 1; k <= tau_; ++k) {
    out.set_censoring(k, pick(censoring(k)));
    out.set_outcome(k, pick(outcome(k)));
  }
  return out;
}

void LongitudinalDataset::validate() const {
  auto require_sized = [&](const std::vector<double>& v, const char* what,
                           int time) {
    if (v.size() != n_) {
      throw DimensionMismatch(std::string(what) + " at time " +
                              std::to_string(time) +
                              " is unset or has wrong length");
    }
  };
  for (int k = 0; k < tau_; ++k) {
    require_sized(treatment(k), "treatment", k);
    for (const auto& col : covariates_[static_cast<std::size_t>(k)]) {
      require_sized(col.values, "covariate", k);
    }
  }
  for (int k = 1; k <= tau_; ++k) {
    require_sized(censoring(k), "censoring", k);
    require_sized(outcome(k), "outcome", k);
  }

  auto is01 = [](double v) { return v == 0.0 || v == 1.0; };

  for (std::size_t i = 0; i < n_; ++i) {
    // Censoring: observed, binary, monotone.  censor_at = first k with
    // C_k = 1 (tau + 1 when never censored).
    int censor_at = tau_ + 1;
    for (int k = 1; k <= tau_; ++k) {
      const double c = censoring(k)[i];
      if (is_missing(c)) {
        throw ValidationError(i, k, "censoring indicator is missing");
      }
      if (!is01(c)) {
        throw ValidationError(i, k, "censoring indicator not in {0, 1}");
      }
      if (c == 1.0 && censor_at > tau_) censor_at = k;
      if (c == 0.0 && censor_at <= tau_) {
        throw ValidationError(i, k,
                              "censoring is not monotone (0 after a 1)");
      }
    }

    for (int k = 0; k < tau_; ++k) {
      const double a = treatment(k)[i];
      const bool should_observe = k < censor_at;
      if (should_observe) {
        if (is_missing(a)) {
          throw ValidationError(i, k, "treatment missing while uncensored");
        }
        if (!is01(a)) {
          throw ValidationError(i, k, "treatment not in {0, 1}");
        }
      } else if (!is_missing(a)) {
        throw ValidationError(i, k, "treatment observed after censoring");
      }
      for (const auto& col : covariates_[static_cast<std::size_t>(k)]) {
        const double v = col.values[i];
        if (should_observe) {
          if (is_missing(v)) {
            throw ValidationError(i, k, "covariate '" + col.name +
                                            "' missing while uncensored");
          }
          if (std::isinf(v)) {
            throw ValidationError(i, k,
                                  "covariate '" + col.name + "' is infinite");
          }
        } else if (!is_missing(v)) {
          throw ValidationError(
              i, k, "covariate '" + col.name + "' observed after censoring");
        }
      }
    }

    for (int k = 1; k <= tau_; ++k) {
      const double y = outcome(k)[i];
      if (k < censor_at) {
        if (is_missing(y)) {
          throw ValidationError(i, k, "outcome missing while uncensored");
        }
        if (!(y >= 0.0 && y <= 1.0)) {
          throw ValidationError(i, k, "outcome outside [0, 1]");
        }
      } else if (!is_missing(y)) {
        throw ValidationError(i, k, "outcome observed after censoring");
      }
    }
  }
}

}  // namespace icemest::data
