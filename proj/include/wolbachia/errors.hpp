#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wolbachia {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value is missing, malformed or outside its valid range.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Inputs are valid individually but the requested quantity is undefined for them.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A root finder was handed an interval without a sign change (or outcome flip).
class BracketError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical scheme broke down (NaN, unrecoverable undershoot, missed event).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::int64_t step = -1)
      : Error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

/// The moving front reached the end of the truncated v-domain.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A simulation probe could not be classified within its horizon.
class HorizonError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace wolbachia
