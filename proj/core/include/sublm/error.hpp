#pragma once

#include <stdexcept>
#include <string>

namespace sublm {

// Error categories map 1:1 onto CLI exit codes: validation 1, numeric 2, io 3.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const { return 1; }
};

// Bad configuration, contract violations, malformed in-memory arguments.
class ValidationError : public Error {
public:
  using Error::Error;
  int exit_code() const override { return 1; }
};

// Non-finite values, divergence, failed numeric checks.
class NumericError : public Error {
public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

// Missing files, unreadable or corrupt on-disk data.
class IoError : public Error {
public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

// Raised by the syllabifier for vowel-less words; callers usually drop the
// word and keep going, so it gets its own type.
class NoNucleusError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

} // namespace sublm
