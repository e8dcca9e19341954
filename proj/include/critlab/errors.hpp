#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace critlab {

// Base of every error the library throws. `kind()` is a stable lowercase tag
// used by the CLI for its machine-readable error line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "config"; }
};

class RangeError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "range"; }
};

class EvaluationError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "evaluation"; }
};

class NoFixedPointError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "no-fixed-point"; }
};

class ProtocolError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "protocol"; }
};

class InsufficientRangeError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* kind() const noexcept override { return "insufficient-range"; }
};

// Integration produced a non-finite state. Carries the last finite sample.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_time, std::vector<double> last_state)
      : Error(what), last_time_(last_time), last_state_(std::move(last_state)) {}

  [[nodiscard]] const char* kind() const noexcept override { return "divergence"; }
  [[nodiscard]] double last_time() const noexcept { return last_time_; }
  [[nodiscard]] const std::vector<double>& last_state() const noexcept { return last_state_; }

 private:
  double last_time_;
  std::vector<double> last_state_;
};

// A model state variable left the domain its adaptation law is defined on.
class DomainExitError : public Error {
 public:
  DomainExitError(const std::string& what, double exit_time)
      : Error(what), exit_time_(exit_time) {}

  [[nodiscard]] const char* kind() const noexcept override { return "domain-exit"; }
  [[nodiscard]] double exit_time() const noexcept { return exit_time_; }

 private:
  double exit_time_;
};

}  // namespace critlab
