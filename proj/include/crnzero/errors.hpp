#pragma once

#include <stdexcept>
#include <string>

namespace crnzero {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network file. Carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A structural hypothesis required by an operation does not hold.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The ODE integrator produced an inadmissible state or could not advance.
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The requested class has no strictly positive point.
class ClassNotPositive : public Error {
 public:
  using Error::Error;
};

}  // namespace crnzero
