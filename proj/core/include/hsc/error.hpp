#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsc {

// Base for every error raised by the library. Input-shaped failures
// (bad files, bad arguments) derive from InputError so front ends can map
// them to a usage/input exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class MalformedCode : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : InputError(what) {}

  /// 1-based line number, or 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

class DuplicateId : public InputError {
 public:
  using InputError::InputError;
};

class DuplicateHeading : public InputError {
 public:
  using InputError::InputError;
};

class EmptyInput : public InputError {
 public:
  using InputError::InputError;
};

class EmptyManual : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class BadK : public InputError {
 public:
  using InputError::InputError;
};

class BadTemperature : public InputError {
 public:
  using InputError::InputError;
};

class UntrainedModel : public Error {
 public:
  using Error::Error;
};

}  // namespace hsc
