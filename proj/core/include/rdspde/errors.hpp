#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdspde {

/// Argument outside the mathematical domain of an operation (negative time,
/// out-of-range multi-index, invalid polynomial, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to converge or produced non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated trajectory left the finite range.
class BlowUpError : public NumericError {
 public:
  BlowUpError(std::size_t step, double time);

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// Invalid configuration. `field` names the offending key, `line` is the
/// 1-based source line when known (0 otherwise).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0);

  const std::string& field() const noexcept { return field_; }
  /// The message without the line/field prefix.
  const std::string& detail() const noexcept { return detail_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  std::string detail_;
  int line_;
};

}  // namespace rdspde
