#pragma once

#include <stdexcept>
#include <string>

namespace nambu {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments: dimension mismatch, nonpositive step, bad chart, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during a computation (exit status 3 in the CLI).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : NumericalError(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Density (or wave-function magnitude) fell below the configured floor.
class DensityUnderflow : public NumericalError {
 public:
  DensityUnderflow(const std::string& what, double min_value)
      : NumericalError(what), min_value_(min_value) {}

  double min_value() const noexcept { return min_value_; }

 private:
  double min_value_;
};

/// Invalid run configuration (exit status 2 in the CLI).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nambu
