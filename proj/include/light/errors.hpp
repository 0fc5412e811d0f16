#pragma once

#include <stdexcept>
#include <string>

namespace light {

/// Argument outside the mathematical domain of a function (ln_q at x <= 0,
/// W_0 below -1/e, rate_f where -l'/a <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A formula could not be evaluated in floating point (vanishing
/// denominator, non-finite result, iteration that failed to converge).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter tuple violates its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite state or gradient during training. Carries the position in
/// the run where it was detected.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch = -1, int step = -1, int layer = -1)
      : std::runtime_error(what), epoch_(epoch), step_(step), layer_(layer) {}

  int epoch() const noexcept { return epoch_; }
  int step() const noexcept { return step_; }
  int layer() const noexcept { return layer_; }

 private:
  int epoch_;
  int step_;
  int layer_;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : std::runtime_error(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Bad experiment configuration; `key_path()` names the offending key as
/// "section.key".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace light
