#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace idde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or scenario. `field` names the offending entry
/// (a JSON-pointer-like path when the scenario came from a document).
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Evaluation requested outside the stored domain.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, double lo, double hi)
      : Error(message + " (valid range [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(double t, double value)
      : NumericError("solution diverged at t=" + std::to_string(t) + " (|x|=" + std::to_string(value) + ")"),
        time_(t) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// u + I(u) == 0: the impulse sends the state to zero, so J(u) is undefined.
class SingularImpulseError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Period-map iteration did not reach the requested tolerance.
class NonConvergenceError : public NumericError {
 public:
  NonConvergenceError(const std::string& message, std::vector<double> tail)
      : NumericError(message), tail_(std::move(tail)) {}

  const std::vector<double>& tail() const noexcept { return tail_; }

 private:
  std::vector<double> tail_;
};

}  // namespace idde
