#pragma once

#include <stdexcept>
#include <string>

namespace pgjr {

/// Base of every exception the engine throws. The C API maps each subclass
/// onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, mismatched shapes, invalid configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable input files and failed writes.
class DataFormatError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf, divergence, degenerate vectors.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pgjr
