#pragma once

#include <stdexcept>
#include <string>

namespace sdr {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid parameter values (d outside (0,0.5), mu outside (0,1], rho below
/// the feasible bound, nonpositive lambda, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Dimension mismatch between vectors/matrices.
struct ShapeError : Error {
  using Error::Error;
};

/// Argument outside its mathematical domain (eta outside [0,1], noise rate
/// outside [0,0.5), ...).
struct DomainError : Error {
  using Error::Error;
};

/// Problems with input data files (parse failures, bad labels, empty sets).
struct DataError : Error {
  using Error::Error;
};

/// Base for model deserialization failures.
struct ModelFormatError : Error {
  using Error::Error;
};

struct VersionMismatchError : ModelFormatError {
  using ModelFormatError::ModelFormatError;
};

struct CorruptModelError : ModelFormatError {
  using ModelFormatError::ModelFormatError;
};

}  // namespace sdr
