#pragma once

#include <stdexcept>
#include <string>

namespace steeplab {

/// Invalid input: bad parameters, malformed config, dimension mismatch.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not be completed (step underflow, non-finite values,
/// crossing budget exhausted, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace steeplab
