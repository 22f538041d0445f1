#pragma once

#include <stdexcept>
#include <string>

namespace dtsp {

// Base class for everything the library throws on bad input or broken state.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed TSPLIB input. The message carries the offending line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A size or width limit was exceeded (mask width, oracle size, table memory).
class GuardError : public Error {
 public:
  using Error::Error;
};

// Contradictory or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed. Always a bug, never bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace dtsp
