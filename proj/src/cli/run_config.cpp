#include "icemest/cli/run_config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "icemest/boot/bootstrap.hpp"
#include "icemest/data/csv.hpp"
#include "icemest/errors.hpp"
#include "icemest/gcomp/estimate.hpp"
#include "icemest/mest/sandwich.hpp"
#include "icemest/mest/solver.hpp"
#include "icemest/sim/study.hpp"
#include "icemest/util/rng.hpp"
#include "icemest/util/stats.hpp"

namespace icemest::cli {

using json = nlohmann::ordered_json;

namespace {

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid json: ") + err.what());
  }
}

void require_keys(const json& obj, const std::string& context,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError(context + " must be a json object");
  }
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + context);
    }
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& context) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + context);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& context,
         T fallback) {
  if (!obj.contains(key)) return fallback;
  return get_as<T>(obj, key, context);
}

data::TreatmentPlan parse_plan(const json& value, const std::string& context) {
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "always") return data::TreatmentPlan::always();
    if (s == "never") return data::TreatmentPlan::never();
    if (s == "natural_course") return data::TreatmentPlan::natural_course();
    throw ConfigError("unknown plan '" + s + "' in " + context);
  }
  if (value.is_array()) {
    std::vector<double> values;
    for (const auto& v : value) {
      if (!v.is_number()) {
        throw ConfigError("plan array must hold 0/1 numbers in " + context);
      }
      values.push_back(v.get<double>());
    }
    return data::TreatmentPlan::custom(std::move(values));
  }
  throw ConfigError("plan must be a string or an array in " + context);
}

mest::SolveConfig parse_solve(const json& obj, const std::string& context) {
  mest::SolveConfig solve;
  if (!obj.contains("solve")) return solve;
  const json& s = obj.at("solve");
  require_keys(s, context + ".solve",
               {"max_iterations", "root_tolerance", "fd_relative_step"});
  solve.max_iterations =
      get_or<int>(s, "max_iterations", context, solve.max_iterations);
  solve.root_tolerance =
      get_or<double>(s, "root_tolerance", context, solve.root_tolerance);
  solve.fd_relative_step =
      get_or<double>(s, "fd_relative_step", context, solve.fd_relative_step);
  return solve;
}

data::Term parse_term(const json& t, const std::string& context) {
  require_keys(t, context,
               {"kind", "time", "name", "value", "knots", "first", "second"});
  const std::string kind = get_as<std::string>(t, "kind", context);
  if (kind == "intercept") return data::TermIntercept{};
  if (kind == "treatment") {
    return data::TermTreatment{get_as<int>(t, "time", context)};
  }
  if (kind == "covariate") {
    return data::TermCovariate{get_as<int>(t, "time", context),
                               get_as<std::string>(t, "name", context)};
  }
  if (kind == "indicator") {
    return data::TermIndicator{get_as<int>(t, "time", context),
                               get_as<std::string>(t, "name", context),
                               get_as<double>(t, "value", context)};
  }
  if (kind == "spline") {
    return data::TermSpline{get_as<int>(t, "time", context),
                            get_as<std::string>(t, "name", context),
                            get_as<std::vector<double>>(t, "knots", context)};
  }
  if (kind == "interaction") {
    return data::TermInteraction{
        static_cast<std::size_t>(get_as<int>(t, "first", context)),
        static_cast<std::size_t>(get_as<int>(t, "second", context))};
  }
  throw ConfigError("unknown term kind '" + kind + "' in " + context);
}

std::vector<data::DesignSpec> parse_design(const json& obj,
                                           const std::string& context) {
  if (!obj.contains("design")) return {};
  const json& d = obj.at("design");
  if (d.is_string()) {
    if (d.get<std::string>() == "default") return {};
    throw ConfigError("design must be \"default\" or an array in " + context);
  }
  if (!d.is_array()) {
    throw ConfigError("design must be \"default\" or an array in " + context);
  }
  std::vector<std::pair<int, data::DesignSpec>> entries;
  for (const auto& item : d) {
    require_keys(item, context + ".design[]", {"time", "terms"});
    const int time = get_as<int>(item, "time", context);
    data::DesignSpec spec;
    if (!item.contains("terms") || !item.at("terms").is_array()) {
      throw ConfigError("design entry needs a 'terms' array in " + context);
    }
    for (const auto& t : item.at("terms")) {
      spec.terms.push_back(parse_term(t, context + ".design.terms"));
    }
    entries.emplace_back(time, std::move(spec));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<data::DesignSpec> specs;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first != static_cast<int>(i)) {
      throw ConfigError("design times must cover 0..tau-1 exactly in " +
                        context);
    }
    specs.push_back(std::move(entries[i].second));
  }
  return specs;
}

gcomp::IceConfig parse_ice(const json& obj, const std::string& context) {
  gcomp::IceConfig ice;
  const std::string estimator =
      get_or<std::string>(obj, "estimator", context, "unstratified");
  if (estimator == "stratified") {
    ice.stratified = true;
  } else if (estimator != "unstratified") {
    throw ConfigError("estimator must be 'unstratified' or 'stratified' in " +
                      context);
  }
  const std::string outcome =
      get_or<std::string>(obj, "outcome", context, "repeated_measures");
  if (outcome == "time_to_event") {
    ice.outcome = gcomp::OutcomeKind::time_to_event;
  } else if (outcome != "repeated_measures") {
    throw ConfigError(
        "outcome must be 'repeated_measures' or 'time_to_event' in " +
        context);
  }
  ice.level = get_or<double>(obj, "level", context, 0.95);
  if (!(ice.level > 0.0 && ice.level < 1.0)) {
    throw ConfigError("level must lie in (0, 1) in " + context);
  }
  ice.design = parse_design(obj, context);
  ice.solve = parse_solve(obj, context);
  return ice;
}

json plan_to_json(const data::TreatmentPlan& plan) {
  if (plan.kind() == data::TreatmentPlan::Kind::custom) {
    return json(plan.values());
  }
  return json(plan.label());
}

double round_nonnegative(double v, const char* what) {
  if (!(v >= 0) || v != std::floor(v)) {
    throw ConfigError(std::string(what) + " must be a non-negative integer");
  }
  return v;
}

std::uint64_t parse_seed(const json& obj, const std::string& context,
                         const Overrides& overrides) {
  if (overrides.seed) return *overrides.seed;
  const double raw = get_or<double>(obj, "seed", context, 0.0);
  return static_cast<std::uint64_t>(round_nonnegative(raw, "seed"));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << text;
  out.flush();
  if (!out) throw ConfigError("failed writing output file: " + path);
}

json number_or_null(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

// -------------------------------------------------------------------------
// simulate

struct SimulateSpec {
  std::uint64_t seed = 0;
  int iterations = 1000;
  std::size_t truth_sample = 1'000'000;
  std::vector<std::size_t> sample_sizes;
  std::vector<bool> stratified_flags;
  std::vector<data::TreatmentPlan> plans;
  int workers = 1;
  double level = 0.95;
  mest::SolveConfig solve;
  std::string out = "metrics.csv";
  std::string format = "csv";
  json resolved;
};

SimulateSpec parse_simulate(const json& cfg, const Overrides& overrides) {
  const std::string ctx = "simulate config";
  require_keys(cfg, ctx,
               {"seed", "iterations", "truth_sample", "sample_sizes",
                "estimators", "plans", "workers", "level", "out", "format",
                "solve"});
  SimulateSpec spec;
  spec.seed = parse_seed(cfg, ctx, overrides);
  spec.iterations = overrides.iterations.value_or(
      get_or<int>(cfg, "iterations", ctx, spec.iterations));
  if (spec.iterations < 1) throw ConfigError("iterations must be positive");
  spec.truth_sample = static_cast<std::size_t>(round_nonnegative(
      get_or<double>(cfg, "truth_sample", ctx,
                     static_cast<double>(spec.truth_sample)),
      "truth_sample"));
  if (spec.truth_sample == 0) {
    throw ConfigError("truth_sample must be positive");
  }

  if (!cfg.contains("sample_sizes")) throw ConfigError("missing sample_sizes");
  for (const auto& v : cfg.at("sample_sizes")) {
    if (!v.is_number()) throw ConfigError("sample_sizes must be numbers");
    const double d = round_nonnegative(v.get<double>(), "sample size");
    if (d < 2) throw ConfigError("sample sizes must be at least 2");
    spec.sample_sizes.push_back(static_cast<std::size_t>(d));
  }
  if (spec.sample_sizes.empty()) throw ConfigError("sample_sizes is empty");

  const auto estimators = get_or<std::vector<std::string>>(
      cfg, "estimators", ctx, std::vector<std::string>{"unstratified"});
  for (const auto& e : estimators) {
    if (e == "unstratified") {
      spec.stratified_flags.push_back(false);
    } else if (e == "stratified") {
      spec.stratified_flags.push_back(true);
    } else {
      throw ConfigError("unknown estimator '" + e + "'");
    }
  }
  if (spec.stratified_flags.empty()) throw ConfigError("estimators is empty");

  if (!cfg.contains("plans")) throw ConfigError("missing plans");
  for (const auto& p : cfg.at("plans")) {
    spec.plans.push_back(parse_plan(p, ctx));
  }
  if (spec.plans.empty()) throw ConfigError("plans is empty");

  spec.workers =
      overrides.workers.value_or(get_or<int>(cfg, "workers", ctx, 1));
  if (spec.workers < 1) throw ConfigError("workers must be positive");
  spec.level = get_or<double>(cfg, "level", ctx, 0.95);
  spec.solve = parse_solve(cfg, ctx);
  spec.out = overrides.out.value_or(
      get_or<std::string>(cfg, "out", ctx, spec.out));
  spec.format = overrides.format.value_or(
      get_or<std::string>(cfg, "format", ctx, spec.format));
  if (spec.format != "csv" && spec.format != "json") {
    throw ConfigError("format must be 'csv' or 'json'");
  }

  spec.resolved = json{{"command", "simulate"},
                       {"seed", spec.seed},
                       {"iterations", spec.iterations},
                       {"truth_sample", spec.truth_sample},
                       {"sample_sizes", spec.sample_sizes},
                       {"estimators", estimators},
                       {"plans", json::array()},
                       {"workers", spec.workers},
                       {"level", spec.level},
                       {"out", spec.out},
                       {"format", spec.format}};
  for (const auto& p : spec.plans) {
    spec.resolved["plans"].push_back(plan_to_json(p));
  }
  return spec;
}

// Scenario seeds depend on the cell's content (n, estimator, plan), not its
// position in the grid, so reordering the config cannot change results.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, bool stratified,
                        const data::TreatmentPlan& plan) {
  std::uint64_t plan_code = 0;
  switch (plan.kind()) {
    case data::TreatmentPlan::Kind::always: plan_code = 1; break;
    case data::TreatmentPlan::Kind::never: plan_code = 2; break;
    case data::TreatmentPlan::Kind::natural_course: plan_code = 3; break;
    case data::TreatmentPlan::Kind::custom: {
      plan_code = 16;
      for (double v : plan.values()) plan_code = plan_code * 2 + (v == 1.0);
      break;
    }
  }
  std::uint64_t key = util::derive_seed(seed, n);
  key = util::derive_seed(key, stratified ? 1 : 0);
  return util::derive_seed(key, plan_code);
}

std::string metrics_csv(const std::vector<sim::ScenarioMetrics>& rows) {
  std::string out =
      "n,estimator,plan,bias,ese,ase,ser,coverage,failed,iterations\n";
  auto cell = [](double v) {
    return std::isnan(v) ? std::string{} : util::format_double(v);
  };
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + r.estimator + ',' + r.plan + ',' +
           cell(r.bias) + ',' + cell(r.ese) + ',' + cell(r.ase) + ',' +
           cell(r.ser) + ',' + cell(r.coverage) + ',' +
           std::to_string(r.failed) + ',' + std::to_string(r.iterations) +
           '\n';
  }
  return out;
}

json metrics_json(const std::vector<sim::ScenarioMetrics>& rows,
                  const json& resolved) {
  json out{{"config", resolved}, {"rows", json::array()}};
  for (const auto& r : rows) {
    out["rows"].push_back(json{{"n", r.n},
                               {"estimator", r.estimator},
                               {"plan", r.plan},
                               {"bias", number_or_null(r.bias)},
                               {"ese", number_or_null(r.ese)},
                               {"ase", number_or_null(r.ase)},
                               {"ser", number_or_null(r.ser)},
                               {"coverage", number_or_null(r.coverage)},
                               {"failed", r.failed},
                               {"iterations", r.iterations}});
  }
  return out;
}

// -------------------------------------------------------------------------
// estimate / bench shared pieces

struct EstimateSpec {
  std::string data_path;
  data::TreatmentPlan plan = data::TreatmentPlan::always();
  std::optional<data::TreatmentPlan> contrast;
  gcomp::IceConfig ice;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  json resolved;
};

EstimateSpec parse_estimate(const json& cfg, const Overrides& overrides,
                            bool bench) {
  const std::string ctx = bench ? "bench config" : "estimate config";
  std::set<std::string> allowed = {"data",   "plan",   "contrast", "estimator",
                                   "outcome", "level",  "design",   "solve",
                                   "seed",   "out",    "format",   "workers"};
  if (bench) {
    allowed.insert({"resamples", "ci_method"});
  }
  require_keys(cfg, ctx, allowed);

  EstimateSpec spec;
  if (!cfg.contains("data")) throw ConfigError("missing 'data' in " + ctx);
  spec.data_path = get_as<std::string>(cfg, "data", ctx);
  if (!cfg.contains("plan")) throw ConfigError("missing 'plan' in " + ctx);
  spec.plan = parse_plan(cfg.at("plan"), ctx);
  if (cfg.contains("contrast")) {
    spec.contrast = parse_plan(cfg.at("contrast"), ctx);
  }
  spec.ice = parse_ice(cfg, ctx);
  spec.seed = parse_seed(cfg, ctx, overrides);
  spec.out = overrides.out.value_or(
      get_or<std::string>(cfg, "out", ctx,
                          bench ? "bench.json" : "estimate.json"));
  spec.format = overrides.format.value_or(
      get_or<std::string>(cfg, "format", ctx, "json"));
  if (spec.format != "json") {
    throw ConfigError(std::string(bench ? "bench" : "estimate") +
                      " output format must be 'json'");
  }

  spec.resolved = json{{"command", bench ? "bench" : "estimate"},
                       {"data", spec.data_path},
                       {"plan", plan_to_json(spec.plan)},
                       {"estimator",
                        spec.ice.stratified ? "stratified" : "unstratified"},
                       {"outcome",
                        spec.ice.outcome == gcomp::OutcomeKind::time_to_event
                            ? "time_to_event"
                            : "repeated_measures"},
                       {"level", spec.ice.level},
                       {"seed", spec.seed},
                       {"out", spec.out}};
  if (spec.contrast) {
    spec.resolved["contrast"] = plan_to_json(*spec.contrast);
  }
  return spec;
}

json interval_json(const gcomp::IntervalEstimate& e) {
  return json{{"mu_hat", number_or_null(e.estimate)},
              {"se", number_or_null(e.se)},
              {"ci_lower", number_or_null(e.ci_lower)},
              {"ci_upper", number_or_null(e.ci_upper)}};
}

}  // namespace

int run_simulate(const std::string& config_path, const Overrides& overrides) {
  const SimulateSpec spec = parse_simulate(load_config(config_path), overrides);

  std::vector<sim::ScenarioMetrics> rows;
  for (std::size_t n : spec.sample_sizes) {
    for (bool stratified : spec.stratified_flags) {
      for (const auto& plan : spec.plans) {
        sim::ScenarioConfig scenario;
        scenario.n = n;
        scenario.iterations = spec.iterations;
        scenario.plan = plan;
        scenario.seed = cell_seed(spec.seed, n, stratified, plan);
        scenario.truth_sample = spec.truth_sample;
        scenario.workers = spec.workers;
        scenario.ice.stratified = stratified;
        scenario.ice.level = spec.level;
        scenario.ice.solve = spec.solve;
        rows.push_back(sim::run_study(scenario));
      }
    }
  }

  if (spec.format == "csv") {
    write_text(spec.out, metrics_csv(rows));
  } else {
    write_text(spec.out, metrics_json(rows, spec.resolved).dump(2) + "\n");
  }
  std::cout << "wrote " << spec.out << " (" << rows.size() << " rows)\n";
  return kExitOk;
}

int run_estimate(const std::string& config_path, const Overrides& overrides) {
  const EstimateSpec spec =
      parse_estimate(load_config(config_path), overrides, false);
  const auto dataset = data::load_csv(spec.data_path);

  json out{{"config", spec.resolved}};
  bool converged = false;
  if (spec.contrast) {
    const auto result =
        gcomp::estimate_contrast(dataset, spec.plan, *spec.contrast, spec.ice);
    converged = result.converged;
    out["converged"] = result.converged;
    out["iterations"] = result.iterations;
    out["residual_norm"] = number_or_null(result.residual_norm);
    if (!result.converged) out["failure_reason"] = result.failure_reason;
    out["plan_a"] = interval_json(result.plan_a);
    out["plan_b"] = interval_json(result.plan_b);
    out["difference"] = interval_json(result.difference);
  } else {
    const auto result = gcomp::estimate(dataset, spec.plan, spec.ice);
    converged = result.converged;
    out["mu_hat"] = number_or_null(result.mu_hat);
    out["se"] = number_or_null(result.se);
    out["ci_lower"] = number_or_null(result.ci_lower);
    out["ci_upper"] = number_or_null(result.ci_upper);
    out["converged"] = result.converged;
    out["iterations"] = result.iterations;
    out["residual_norm"] = number_or_null(result.residual_norm);
    if (!result.converged) out["failure_reason"] = result.failure_reason;
  }
  write_text(spec.out, out.dump(2) + "\n");
  std::cout << "wrote " << spec.out << "\n";
  return converged ? kExitOk : kExitConvergence;
}

int run_bench(const std::string& config_path, const Overrides& overrides) {
  const json cfg = load_config(config_path);
  const EstimateSpec spec = parse_estimate(cfg, overrides, true);
  boot::BootstrapConfig boot_config;
  boot_config.resamples = get_or<int>(cfg, "resamples", "bench config", 500);
  boot_config.seed = spec.seed;
  boot_config.workers =
      overrides.workers.value_or(get_or<int>(cfg, "workers", "bench", 1));
  const std::string ci_method =
      get_or<std::string>(cfg, "ci_method", "bench config", "normal");
  if (ci_method == "percentile") {
    boot_config.ci_method = boot::CiMethod::percentile;
  } else if (ci_method != "normal") {
    throw ConfigError("ci_method must be 'normal' or 'percentile'");
  }

  const auto dataset = data::load_csv(spec.data_path);

  json out{{"config", spec.resolved}};
  out["config"]["resamples"] = boot_config.resamples;
  out["config"]["workers"] = boot_config.workers;
  out["config"]["ci_method"] = ci_method;

  // Sandwich side, timed end to end.
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = gcomp::estimate(dataset, spec.plan, spec.ice);
  const double sandwich_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (!est.converged) {
    out["error"] = "estimation failed: " + est.failure_reason;
    write_text(spec.out, out.dump(2) + "\n");
    std::cout << "wrote " << spec.out << "\n";
    return kExitConvergence;
  }

  const auto boot_result =
      boot::bootstrap_estimate(dataset, spec.plan, spec.ice, boot_config);

  out["point"] = est.mu_hat;
  out["methods"] = json::array();
  out["methods"].push_back(json{
      {"method", "sandwich"},
      {"se", est.se},
      {"ci", json::array({est.ci_lower, est.ci_upper})},
      {"resamples", nullptr},
      {"failures", nullptr},
      {"wall_time_seconds", sandwich_seconds},
      {"workers", 1}});
  out["methods"].push_back(json{
      {"method", "bootstrap"},
      {"se", boot_result.se},
      {"ci", json::array({boot_result.ci.first, boot_result.ci.second})},
      {"resamples", boot_result.resamples},
      {"failures", boot_result.failures},
      {"wall_time_seconds", boot_result.wall_seconds},
      {"workers", boot_result.workers}});
  if (boot_result.small_b_warning) {
    out["warnings"] =
        json::array({"bootstrap standard error based on fewer than 30 "
                     "resamples"});
  }
  write_text(spec.out, out.dump(2) + "\n");
  std::cout << "wrote " << spec.out << "\n";
  return kExitOk;
}

}  // namespace icemest::cli
