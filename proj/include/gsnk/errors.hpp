#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "gsnk/types.hpp"

namespace gsnk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad size, index out of range, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A gradient row vanished where the method has to divide by its norm.
class DegenerateRowError : public Error {
 public:
  explicit DegenerateRowError(Index row)
      : Error("degenerate row " + std::to_string(row) + ": gradient has zero norm"), row_(row) {}

  Index row() const noexcept { return row_; }

 private:
  Index row_;
};

/// Exhaustive enumeration refused because it exceeds the configured guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gsnk
