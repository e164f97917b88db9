#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icemest {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by dataset/config checks before any numerics run.
struct ValidationError : Error {
  std::size_t unit;
  int time;
  std::string rule;
  ValidationError(std::size_t unit_, int time_, std::string rule_)
      : Error("validation failed (unit " + std::to_string(unit_) + ", time " +
              std::to_string(time_) + "): " + rule_),
        unit(unit_), time(time_), rule(std::move(rule_)) {}
};

struct ParseError : Error {
  std::size_t row;      // 1-based data row (0 = header)
  std::string column;
  ParseError(std::size_t row_, std::string column_, const std::string& what_)
      : Error("csv row " + std::to_string(row_) + ", column '" + column_ +
              "': " + what_),
        row(row_), column(std::move(column_)) {}
};

struct MissingColumn : Error {
  explicit MissingColumn(const std::string& name)
      : Error("missing column: " + name) {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Time-to-event outcomes must be absorbing.
struct EventNonMonotone : Error {
  std::size_t unit;
  int time;
  EventNonMonotone(std::size_t unit_, int time_)
      : Error("event indicator drops from 1 to 0 (unit " +
              std::to_string(unit_) + ", time " + std::to_string(time_) + ")"),
        unit(unit_), time(time_) {}
};

struct NonFiniteEvaluation : Error {
  using Error::Error;
};

struct SingularBread : Error {
  double rcond;
  explicit SingularBread(double rcond_)
      : Error("bread matrix numerically singular (rcond " +
              std::to_string(rcond_) + ")"),
        rcond(rcond_) {}
};

// A required point estimate (e.g. the bootstrap's full-data fit) did not
// converge; carries the estimator's diagnostic.
struct EstimationFailed : Error {
  using Error::Error;
};

struct TooManyFailures : Error {
  int failures;
  int resamples;
  TooManyFailures(int failures_, int resamples_)
      : Error("bootstrap failure fraction too high: " +
              std::to_string(failures_) + "/" + std::to_string(resamples_)),
        failures(failures_), resamples(resamples_) {}
};

}  // namespace icemest
