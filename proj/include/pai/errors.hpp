#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pai {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not line up (matrix/vector/domain sizes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (network files, configs, CSV).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(message), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Structurally valid input that violates a documented constraint.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A point fell outside the target domain by more than one cell radius.
class SnapError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the configured evaluation cap.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& message, std::size_t required, std::size_t cap)
      : Error(message), required_(required), cap_(cap) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t required_;
  std::size_t cap_;
};

}  // namespace pai
