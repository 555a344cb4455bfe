#pragma once

#include <stdexcept>
#include <string>

namespace ennreg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad CSV, wrong dimensions, invalid settings.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Floating-point failure during evaluation or training (non-finite values,
/// non-convergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Raised when a CDF never reaches the requested probability, which happens
/// for vacuous (zero-precision) evidence.
class UnboundedQuantileError : public Error {
 public:
  using Error::Error;
};

}  // namespace ennreg
