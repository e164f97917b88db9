#include "icemest/data/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "icemest/errors.hpp"

namespace icemest::data {

DesignSpec DesignSpec::full_history(const LongitudinalDataset& data,
                                    int time) {
  DesignSpec spec;
  spec.terms.emplace_back(TermIntercept{});
  for (int t = 0; t <= time; ++t) spec.terms.emplace_back(TermTreatment{t});
  for (int t = 0; t <= time; ++t) {
    for (const auto& name : data.covariate_names(t)) {
      spec.terms.emplace_back(TermCovariate{t, name});
    }
  }
  return spec;
}

DesignSpec DesignSpec::covariate_history(const LongitudinalDataset& data,
                                         int time) {
  DesignSpec spec;
  spec.terms.emplace_back(TermIntercept{});
  for (int t = 0; t <= time; ++t) {
    for (const auto& name : data.covariate_names(t)) {
      spec.terms.emplace_back(TermCovariate{t, name});
    }
  }
  return spec;
}

namespace {

std::size_t term_width(const Term& term) {
  if (const auto* spline = std::get_if<TermSpline>(&term)) {
    if (spline->knots.size() < 3) {
      throw ConfigError("spline term needs at least 3 knots");
    }
    return spline->knots.size() - 1;  // linear column + curvature columns
  }
  return 1;
}

std::string term_name(const Term& term) {
  struct Namer {
    std::string operator()(const TermIntercept&) const { return "(intercept)"; }
    std::string operator()(const TermTreatment& t) const {
      return "A" + std::to_string(t.time);
    }
    std::string operator()(const TermCovariate& t) const {
      return "L" + std::to_string(t.time) + "_" + t.name;
    }
    std::string operator()(const TermIndicator& t) const {
      return "L" + std::to_string(t.time) + "_" + t.name + "==" +
             std::to_string(t.value);
    }
    std::string operator()(const TermSpline& t) const {
      return "rcs(L" + std::to_string(t.time) + "_" + t.name + ")";
    }
    std::string operator()(const TermInteraction& t) const {
      return "term" + std::to_string(t.first) + ":term" +
             std::to_string(t.second);
    }
  };
  return std::visit(Namer{}, term);
}

}  // namespace

std::size_t DesignSpec::column_count() const {
  std::size_t total = 0;
  for (const auto& term : terms) total += term_width(term);
  return total;
}

bool DesignSpec::has_treatment_term() const {
  return std::any_of(terms.begin(), terms.end(), [](const Term& t) {
    return std::holds_alternative<TermTreatment>(t);
  });
}

std::vector<std::string> DesignSpec::column_names() const {
  std::vector<std::string> names;
  for (const auto& term : terms) {
    const std::size_t width = term_width(term);
    const std::string base = term_name(term);
    if (width == 1) {
      names.push_back(base);
    } else {
      for (std::size_t j = 0; j < width; ++j) {
        names.push_back(base + "[" + std::to_string(j) + "]");
      }
    }
  }
  return names;
}

std::vector<std::vector<double>> rcspline_basis(std::span<const double> x,
                                                std::span<const double> knots) {
  const std::size_t m = knots.size();
  if (m < 3) throw ConfigError("restricted cubic spline needs >= 3 knots");
  for (std::size_t j = 1; j < m; ++j) {
    if (!(knots[j] > knots[j - 1])) {
      throw ConfigError("spline knots must be strictly increasing");
    }
  }
  const double t_last = knots[m - 1];
  const double t_penult = knots[m - 2];
  const double scale = (t_last - knots[0]) * (t_last - knots[0]);

  auto cube_pos = [](double v) { return v > 0.0 ? v * v * v : 0.0; };

  std::vector<std::vector<double>> basis(m - 1,
                                         std::vector<double>(x.size(), 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) basis[0][i] = x[i];
  for (std::size_t j = 0; j + 2 < m; ++j) {
    const double wa = (t_last - knots[j]) / (t_last - t_penult);
    const double wb = (t_penult - knots[j]) / (t_last - t_penult);
    auto& col = basis[j + 1];
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i];
      col[i] = (cube_pos(v - knots[j]) - wa * cube_pos(v - t_penult) +
                wb * cube_pos(v - t_last)) /
               scale;
    }
  }
  return basis;
}

DesignMatrix design_matrix(const LongitudinalDataset& data, int time,
                           const DesignSpec& spec, const TreatmentPlan* plan) {
  const std::size_t n = data.units();
  const bool substitute =
      plan != nullptr && plan->kind() != TreatmentPlan::Kind::natural_course;

  DesignMatrix out;
  out.n = n;
  out.valid = data.uncensored_mask(time);
  out.names = spec.column_names();

  // Raw (unmasked) columns per term, in spec order; interactions may refer
  // to any other single-column term.
  std::vector<std::vector<std::vector<double>>> raw(spec.terms.size());

  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const Term& term = spec.terms[t];
    if (std::holds_alternative<TermInteraction>(term)) continue;  // 2nd pass
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, TermIntercept>) {
            raw[t].emplace_back(n, 1.0);
          } else if constexpr (std::is_same_v<T, TermTreatment>) {
            if (substitute) {
              raw[t].emplace_back(n, plan->assigned(node.time));
            } else {
              raw[t].emplace_back(data.treatment(node.time));
            }
          } else if constexpr (std::is_same_v<T, TermCovariate>) {
            raw[t].emplace_back(data.covariate(node.time, node.name));
          } else if constexpr (std::is_same_v<T, TermIndicator>) {
            const auto& src = data.covariate(node.time, node.name);
            std::vector<double> col(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
              col[i] = src[i] == node.value ? 1.0 : 0.0;
            }
            raw[t].push_back(std::move(col));
          } else if constexpr (std::is_same_v<T, TermSpline>) {
            raw[t] =
                rcspline_basis(data.covariate(node.time, node.name), node.knots);
          }
        },
        term);
  }

  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto* inter = std::get_if<TermInteraction>(&spec.terms[t]);
    if (!inter) continue;
    auto single = [&](std::size_t idx) -> const std::vector<double>& {
      if (idx >= spec.terms.size() || idx == t) {
        throw ConfigError("interaction refers to an invalid term index");
      }
      if (std::holds_alternative<TermInteraction>(spec.terms[idx])) {
        throw ConfigError("interaction cannot reference another interaction");
      }
      if (raw[idx].size() != 1) {
        throw ConfigError("interaction needs single-column operands");
      }
      return raw[idx][0];
    };
    const auto& a = single(inter->first);
    const auto& b = single(inter->second);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = a[i] * b[i];
    raw[t].push_back(std::move(col));
  }

  // Assemble: zero-fill rows that are invalid at this time; any NaN left in
  // a valid row means the dataset skipped validate().
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    for (auto& src : raw[t]) {
      std::vector<double> col(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (out.valid[i] == 1.0) {
          if (std::isnan(src[i])) {
            throw ValidationError(
                i, time, "missing value referenced by design column '" +
                             out.names[out.columns.size()] + "'");
          }
          col[i] = src[i];
        }
      }
      out.columns.push_back(std::move(col));
    }
  }
  if (out.columns.size() != spec.column_count()) {
    throw DimensionMismatch("design_matrix: column count mismatch");
  }
  return out;
}

std::vector<double> followers_mask(const LongitudinalDataset& data,
                                   const TreatmentPlan& plan, int time) {
  const std::size_t n = data.units();
  std::vector<double> mask(n, 1.0);
  if (!plan.deterministic()) return mask;
  for (int t = 0; t <= time; ++t) {
    const double want = plan.assigned(t);
    const auto& a = data.treatment(t);
    for (std::size_t i = 0; i < n; ++i) {
      if (is_missing(a[i]) || a[i] != want) mask[i] = 0.0;
    }
  }
  return mask;
}

}  // namespace icemest::data
