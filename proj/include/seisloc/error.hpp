#pragma once

#include <stdexcept>
#include <string>

namespace seisloc {

/// Base class for every error raised by the library. The CLI maps each
/// subclass to a distinct nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ParameterError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class OutOfFieldError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Mismatched dimensions or field configurations between inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class ArityError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 6; }
};

class TrainingInputError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 7; }
};

class DegeneratePairsError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 8; }
};

/// Malformed file contents or CSV schema mismatch.
class FormatError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 9; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 10; }
};

}  // namespace seisloc
