// Command-line front end: simulate (operating characteristics over the
// built-in mechanism), estimate (one dataset), bench (sandwich vs
// bootstrap).  Configuration comes from a json file; a few flags override
// it.  Exit codes: 0 ok, 1 unexpected error, 2 bad config, 3 bad data,
// 4 estimation did not converge (the result file is still written).

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "icemest/cli/run_config.hpp"
#include "icemest/errors.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  icemest::cli::Overrides overrides;
};

void add_common(CLI::App* cmd, SubArgs& args, bool with_iterations) {
  cmd->add_option("--config", args.config_path, "json config file")
      ->required();
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&args](std::uint64_t v) { args.overrides.seed = v; },
      "override the config seed");
  if (with_iterations) {
    cmd->add_option_function<int>(
        "--iterations", [&args](int v) { args.overrides.iterations = v; },
        "override the iteration count");
  }
  cmd->add_option_function<std::string>(
      "--out", [&args](const std::string& v) { args.overrides.out = v; },
      "override the output path");
  cmd->add_option_function<std::string>(
      "--format", [&args](const std::string& v) { args.overrides.format = v; },
      "override the output format (csv|json)");
  cmd->add_option_function<int>(
      "--workers", [&args](int v) { args.overrides.workers = v; },
      "override the worker count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"longitudinal counterfactual means by stacked estimating "
               "equations"};
  app.require_subcommand(1);

  SubArgs sim_args, est_args, bench_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "operating characteristics over the built-in mechanism");
  add_common(sim, sim_args, true);
  CLI::App* est =
      app.add_subcommand("estimate", "estimate counterfactual means from csv");
  add_common(est, est_args, false);
  CLI::App* bench = app.add_subcommand(
      "bench", "compare sandwich and bootstrap uncertainty on one dataset");
  add_common(bench, bench_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return icemest::cli::kExitConfig;
  }

  try {
    if (sim->parsed()) {
      return icemest::cli::run_simulate(sim_args.config_path,
                                        sim_args.overrides);
    }
    if (est->parsed()) {
      return icemest::cli::run_estimate(est_args.config_path,
                                        est_args.overrides);
    }
    return icemest::cli::run_bench(bench_args.config_path,
                                   bench_args.overrides);
  } catch (const icemest::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return icemest::cli::kExitConfig;
  } catch (const icemest::ParseError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return icemest::cli::kExitValidation;
  } catch (const icemest::MissingColumn& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return icemest::cli::kExitValidation;
  } catch (const icemest::ValidationError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return icemest::cli::kExitValidation;
  } catch (const icemest::EventNonMonotone& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return icemest::cli::kExitValidation;
  } catch (const icemest::EstimationFailed& err) {
    std::cerr << "estimation failed: " << err.what() << "\n";
    return icemest::cli::kExitConvergence;
  } catch (const icemest::TooManyFailures& err) {
    std::cerr << "estimation failed: " << err.what() << "\n";
    return icemest::cli::kExitConvergence;
  } catch (const icemest::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return icemest::cli::kExitError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return icemest::cli::kExitError;
  }
}
