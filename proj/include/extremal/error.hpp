#pragma once

#include <stdexcept>
#include <string>

namespace extremal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument lies outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature hit its recursion limit before meeting the tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Input that contradicts a structural invariant (e.g. a quartic with P(1) >= 0).
class InconsistentInput : public Error {
 public:
  using Error::Error;
};

/// The tau estimate did not converge, so bounds cannot be formed.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Neither Newton nor the monotone iteration produced a solution.
class NoSolution : public Error {
 public:
  using Error::Error;
};

/// Iterate reached the blow-up point of a singular nonlinearity.
class SingularTouch : public Error {
 public:
  using Error::Error;
};

/// Parse error carrying a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Semantically invalid configuration; names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace extremal
