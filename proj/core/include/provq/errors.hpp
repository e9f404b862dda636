#pragma once

#include <stdexcept>

namespace provq {

// Error taxonomy shared across the library. The CLI maps ConfigError and
// UsageError to exit code 2 and every other failure to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor shapes; the message names the offending operand.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Bad configuration value, unknown config key, unusable CLI invocation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Degenerate geometry (zero radius, collinear triangle vertices).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Non-finite values: diverged loss, NaN gradient, bad input tensor.
class NumericError : public Error {
 public:
  using Error::Error;
};

// File read/write failure; the message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace provq
