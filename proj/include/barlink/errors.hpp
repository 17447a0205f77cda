#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace barlink {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: rank deficiency, divergence guard, undefined metric.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A dense method refused an instance above its node cap.
class ScaleError : public Error {
 public:
  using Error::Error;
};

}  // namespace barlink
