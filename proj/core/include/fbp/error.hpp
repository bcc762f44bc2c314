#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fbp {

// Root of every error thrown by the library. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from the closest category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied data that violates an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A parameter record violates its model's invariants.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Numerical procedures that cannot produce a trustworthy value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Simplex search hit its iteration cap; carries the best point found.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double best_value,
                   std::vector<double> best_point)
      : NumericalError(what),
        best_value_(best_value),
        best_point_(std::move(best_point)) {}

  double best_value() const noexcept { return best_value_; }
  const std::vector<double>& best_point() const noexcept { return best_point_; }

 private:
  double best_value_;
  std::vector<double> best_point_;
};

class SamplerFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class CalibrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Scale denominator of the competition MSIS is zero.
class DegenerateScale : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fbp
