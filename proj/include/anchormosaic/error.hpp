#pragma once

#include <stdexcept>
#include <string>

namespace anchormosaic {

/// Base of every error raised by the library. The CLI maps the two
/// families below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad dimension, negative parameter, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested combination has no implementation (e.g. interval constants for k >= 3).
class UnsupportedError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Numerical failure: series divergence, iteration caps, degenerate geometry.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IterationCapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Input violates general position beyond the configured tolerance.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A tolerance-based decision could not be made (value inside the guard band).
class ToleranceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace anchormosaic
