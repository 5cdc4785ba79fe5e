/*
 * rfsense - error types shared across the toolkit.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfsense {

/// Base class for all rfsense errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, flags, or scenario/detector configuration.
/// CLI maps this to exit code 1 (usage error).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (CSV/JSONL). Carries the 1-based line number.
/// CLI maps this to exit code 2 (data error).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Well-formed input that violates a data invariant: duplicate cells,
/// non-finite magnitudes, out-of-order packets, schedule length mismatch,
/// empty difference maps. CLI maps this to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfsense
