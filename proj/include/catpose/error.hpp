#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace catpose {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (empty cloud, size mismatch,
// non-rotation matrix, unknown category, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The input is well formed but geometrically degenerate (collinear points,
// zero-extent model, ...).
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

// Malformed file content. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace catpose
