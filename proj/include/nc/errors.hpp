#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nc {

// Base of every error raised by the library. The CLI maps the three
// families below onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input or configuration (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation, e.g. ln of a
// nonpositive density.
class DomainError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Numerical failure (exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An exponent alpha . m(v_q) exceeded the overflow guard.
class RangeError : public NumericalError {
 public:
  RangeError(const std::string& what, std::size_t node, double exponent)
      : NumericalError(what), node_(node), exponent_(exponent) {}

  std::size_t node() const { return node_; }
  double exponent() const { return exponent_; }

 private:
  std::size_t node_;
  double exponent_;
};

// Hessian could not be factorized even after regularization; the moment is
// too close to the realizable boundary for the configured quadrature.
class BoundaryProximityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RealizabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// File and format problems (exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : IoError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class HeaderMismatchError : public IoError {
 public:
  using IoError::IoError;
};

class EmptyDatasetError : public IoError {
 public:
  using IoError::IoError;
};

class ModelFormatError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace nc
