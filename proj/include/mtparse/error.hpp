#pragma once

#include <stdexcept>
#include <string>

namespace mtparse {

/// Bad configuration: invalid ratios, missing fields, unknown keys.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Carries an optional 1-based line.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what, long line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    long line() const noexcept { return line_; }

  private:
    long line_;
};

/// Well-formed data that violates a structural invariant (tree shape, span partition).
class ValidationError : public DataError {
  public:
    using DataError::DataError;
};

/// Assembled input exceeds the configured token budget.
class LengthError : public DataError {
  public:
    using DataError::DataError;
};

class ShapeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Non-finite loss or gradient.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace mtparse
