#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dai {

/// Malformed input file. Carries the 1-based line number when one applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Invalid hyperparameters or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loss of positive definiteness or similar numerical breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency check failed (e.g. incremental statistics drifted).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dai
