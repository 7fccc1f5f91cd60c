#pragma once

#include <stdexcept>
#include <string>

namespace odlearn {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input violates a documented precondition (bad ranges, mismatched sizes).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input is outside the mathematical domain of the operation
/// (hyperbolic state passed to an elliptic-only conversion, etc).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge; carries the final residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual=" + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Numerical integration could not continue; carries the last good epoch.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_good_epoch_s)
      : Error(what + " (last good epoch=" + std::to_string(last_good_epoch_s) + " s)"),
        last_good_epoch_s_(last_good_epoch_s) {}
  double last_good_epoch_s() const { return last_good_epoch_s_; }

 private:
  double last_good_epoch_s_;
};

/// Linear algebra failed (singular system, indefinite matrix).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Configuration text failed validation; message carries the field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace odlearn
