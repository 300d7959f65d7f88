#pragma once

#include <stdexcept>
#include <string>

namespace demacc {

/// Base class of every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or stream (exit code 3).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line == 0 ? what
                        : what + " (line " + std::to_string(line) +
                              (column == 0 ? std::string() : ", column " + std::to_string(column)) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Statistic is undefined for the data at hand: too few values, zero
/// variance, all-zero weights (exit code 4).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace demacc
