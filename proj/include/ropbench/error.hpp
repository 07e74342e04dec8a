#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ropbench {

// Base of every error raised by the library. Harness code catches this type to
// record a trial failure instead of aborting the run.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DuplicateVariableError : public Error {
 public:
  using Error::Error;
};

class InvalidParamsError : public Error {
 public:
  using Error::Error;
};

class UnassignedVariableError : public Error {
 public:
  using Error::Error;
};

// Raised when a polynomial expansion exceeds its term cap.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

// Raised when a matrix or generator would exceed a configured size limit.
class CapError : public Error {
 public:
  using Error::Error;
};

class NonMultilinearError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DivisibilityError : public InvalidParamsError {
 public:
  using InvalidParamsError::InvalidParamsError;
};

// Generator size limit exceeded.
class SizeError : public CapError {
 public:
  using CapError::CapError;
};

// A required 1 outside the special columns was absent from a row.
class NoEligibleOneError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class AllTrialsErroredError : public Error {
 public:
  using Error::Error;
};

}  // namespace ropbench
