#include "icemest/data/plan.hpp"

#include <stdexcept>

#include "icemest/errors.hpp"

namespace icemest::data {

TreatmentPlan TreatmentPlan::always() { return TreatmentPlan(Kind::always); }
TreatmentPlan TreatmentPlan::never() { return TreatmentPlan(Kind::never); }
TreatmentPlan TreatmentPlan::natural_course() {
  return TreatmentPlan(Kind::natural_course);
}

TreatmentPlan TreatmentPlan::custom(std::vector<double> values) {
  if (values.empty()) {
    throw ConfigError("custom plan needs at least one treatment value");
  }
  for (double v : values) {
    if (!(v == 0.0 || v == 1.0)) {
      throw ConfigError("custom plan values must be 0 or 1");
    }
  }
  return TreatmentPlan(Kind::custom, std::move(values));
}

double TreatmentPlan::assigned(int time) const {
  switch (kind_) {
    case Kind::always: return 1.0;
    case Kind::never: return 0.0;
    case Kind::custom:
      if (time < 0 || static_cast<std::size_t>(time) >= values_.size()) {
        throw std::out_of_range("custom plan has no value at time " +
                                std::to_string(time));
      }
      return values_[static_cast<std::size_t>(time)];
    case Kind::natural_course:
      throw std::logic_error("natural-course plan assigns no fixed value");
  }
  throw std::logic_error("unreachable");
}

std::string TreatmentPlan::label() const {
  switch (kind_) {
    case Kind::always: return "always";
    case Kind::never: return "never";
    case Kind::natural_course: return "natural_course";
    case Kind::custom: {
      std::string out = "custom(";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ',';
        out += values_[i] == 1.0 ? '1' : '0';
      }
      out += ')';
      return out;
    }
  }
  return "unknown";
}

}  // namespace icemest::data
