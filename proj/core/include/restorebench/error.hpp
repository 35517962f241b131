#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace restorebench {

// Base for every error raised by the library. Each subclass maps to one
// failure family so callers (and the CLI's exit codes) can tell malformed
// data apart from runtime faults.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based; 0 means "not line oriented".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line),
        detail_(what) {}
  std::size_t line() const noexcept { return line_; }
  // Message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// Well-formed input that violates a domain invariant or cross-file integrity.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

// An iterative algorithm produced a non-finite value.
class NumericError : public Error {
 public:
  NumericError(int iteration, const std::string& what)
      : Error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace restorebench
