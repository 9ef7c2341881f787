#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oqs {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit together.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A documented precondition on an operand does not hold (e.g. non-Hermitian
/// generator passed to the exponential).
class ContractViolation : public Error {
public:
  using Error::Error;
};

/// A scalar parameter is out of its admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// A composite input (state, Hamiltonian part) failed validation.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// The input is well-formed but outside what the operation supports.
class UnsupportedInput : public Error {
public:
  using Error::Error;
};

/// H_E has no spectral spread, so its memory time is undefined.
class DegenerateEnvironment : public ParameterError {
public:
  using ParameterError::ParameterError;
};

/// A file could not be opened, written or read back.
class IoError : public Error {
public:
  using Error::Error;
};

/// Scenario document error, carrying the offending line (0 when the problem
/// is a missing section or key) and key.
class ParseError : public Error {
public:
  ParseError(std::size_t line, std::string key, const std::string &message)
      : Error(format(line, key, message)), line_(line), key_(std::move(key)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string &key() const noexcept { return key_; }

private:
  static std::string format(std::size_t line, const std::string &key,
                            const std::string &message) {
    std::string out;
    if (line > 0)
      out += "line " + std::to_string(line) + ": ";
    if (!key.empty())
      out += "'" + key + "': ";
    return out + message;
  }

  std::size_t line_;
  std::string key_;
};

} // namespace oqs
