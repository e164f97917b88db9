#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace icemest::util {

// Inverse standard normal CDF.  Hastings-style initial guess polished with
// Halley steps against erfc, accurate to ~1e-15 over (0, 1).
double normal_quantile(double p);

double mean(std::span<const double> x);

// Sample standard deviation (n-1 denominator); n < 2 is an error.
double sample_sd(std::span<const double> x);

// Shortest decimal string that round-trips to the same double.  Integral
// values print without a fraction part ("1" not "1.0").
std::string format_double(double v);

}  // namespace icemest::util
