#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccd {

// Malformed or out-of-contract input data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// CSV parse failure; carries the 1-based row where it happened.
class ParseError : public InputError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : InputError("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Invalid method configuration (alpha, replicate count, missing delta, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A metric that is not defined for the given input (e.g. silhouette with a
// single cluster).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An internal invariant failed to hold. Indicates a bug, not bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ccd
