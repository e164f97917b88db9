#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace icemest::cli {

// Command-line overrides applied on top of the JSON config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> workers;
};

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitConvergence = 4;

int run_simulate(const std::string& config_path, const Overrides& overrides);
int run_estimate(const std::string& config_path, const Overrides& overrides);
int run_bench(const std::string& config_path, const Overrides& overrides);

}  // namespace icemest::cli
