#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or configuration value violates its documented domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed. `line()` is 1-based; 0 means "whole file".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Filesystem failure; the message always names the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace asp
