#pragma once

#include <stdexcept>
#include <string>

namespace lbesc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (dithers, specs, scenario files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (CSV files, empty series, mismatched logs).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An operation needs something the model does not provide, e.g. an
/// analytic gradient that only oracles may use.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Unknown preset or key.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A scalar map produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double argument)
      : Error(what + " (argument " + std::to_string(argument) + ")"),
        argument_(argument) {}

  double argument() const noexcept { return argument_; }

 private:
  double argument_;
};

/// A Runge-Kutta stage came back non-finite.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time, int stage)
      : Error(what + " at t=" + std::to_string(time) + ", stage " +
              std::to_string(stage)),
        time_(time),
        stage_(stage) {}

  double time() const noexcept { return time_; }
  int stage() const noexcept { return stage_; }

 private:
  double time_;
  int stage_;
};

/// The simulated state left the admissible region.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The Kalman filter state or covariance became non-finite.
class FilterDivergenceError : public DivergenceError {
 public:
  using DivergenceError::DivergenceError;
};

}  // namespace lbesc
