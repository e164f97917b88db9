#pragma once

#include <string>
#include <vector>

namespace icemest::data {

// A treatment strategy whose counterfactual mean is the estimand.  The
// deterministic kinds substitute fixed values into the plan design
// matrices; natural_course keeps the observed treatments.
class TreatmentPlan {
 public:
  enum class Kind { always, never, custom, natural_course };

  static TreatmentPlan always();
  static TreatmentPlan never();
  static TreatmentPlan natural_course();
  // One 0/1 value per treatment time; length must match the dataset horizon
  // (checked where the plan is applied).
  static TreatmentPlan custom(std::vector<double> values);

  Kind kind() const { return kind_; }
  bool deterministic() const { return kind_ != Kind::natural_course; }

  // Assigned value at `time` for deterministic plans; custom plans throw
  // std::out_of_range past their length.
  double assigned(int time) const;

  const std::vector<double>& values() const { return values_; }
  std::string label() const;

  bool operator==(const TreatmentPlan&) const = default;

 private:
  explicit TreatmentPlan(Kind kind, std::vector<double> values = {})
      : kind_(kind), values_(std::move(values)) {}
  Kind kind_;
  std::vector<double> values_;
};

}  // namespace icemest::data
