#pragma once

#include <stdexcept>
#include <string>

namespace hf {

// Base type for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration, malformed input files, bad CLI arguments.
struct ConfigError : Error {
  using Error::Error;
};

// Mismatched tensor/matrix dimensions.
struct ShapeError : Error {
  using Error::Error;
};

// Non-finite values where finite ones are required.
struct NumericalError : Error {
  using Error::Error;
};

// Iterative solver failed to produce a usable result.
struct SolverError : Error {
  using Error::Error;
};

// Non-finite state during numerical integration.
struct IntegrationError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace hf
