#pragma once

#include <stdexcept>
#include <string>

namespace pfq {

// Base class for all library errors. The CLI maps the subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration (exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// A numerically infeasible request: branch ambiguity, non-PSD tensors, dimension limit (exit code 3).
struct NumericError : Error {
  using Error::Error;
};

struct DimensionError : NumericError {
  using NumericError::NumericError;
};

// File access or parse failure (exit code 4).
struct IoError : Error {
  using Error::Error;
};

}  // namespace pfq
