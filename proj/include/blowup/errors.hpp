#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: non-geometric grids, bad parameters, parse failures.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A function was evaluated outside the region where it is defined or
// representable in double precision.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A mathematical hypothesis (class membership, growth condition, ...) fails.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A declared class tag disagrees with the extrapolated behaviour of the data.
class ClassificationError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace blowup
