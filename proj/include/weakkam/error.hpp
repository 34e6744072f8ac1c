#pragma once

#include <stdexcept>
#include <string>

namespace weakkam {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The c-sublevel {H(x,p) <= c} has no sampled point.
class NoSublevel : public Error {
 public:
  using Error::Error;
};

/// A Legendre transform maximum landed on the boundary of the momentum grid.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A velocity outside the configured search box was requested.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class EmptyAubrySet : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An error raised inside a pipeline stage, prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace weakkam
