#pragma once

#include <stdexcept>
#include <string>

namespace fbl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative time,
/// alpha outside [0, 2], non-mean-zero input to a homogeneous norm, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A dyadic index lies outside the range resolvable on the grid.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The grid cannot host the requested construction.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A NaN or Inf appeared where finite values are required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fbl
