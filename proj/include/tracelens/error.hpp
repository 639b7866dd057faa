#pragma once

#include <stdexcept>
#include <string>

namespace tracelens {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A finding, link, or annotation names a trace or turn the transcript lacks.
class InvalidReference : public Error {
 public:
  using Error::Error;
};

// Ladder operation issued in a phase that does not admit it.
class IllegalTransition : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries the 1-based line when one applies.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracelens
