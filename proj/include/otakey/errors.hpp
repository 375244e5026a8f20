#pragma once

#include <stdexcept>
#include <string>

namespace otakey {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveInput : public Error {
 public:
  using Error::Error;
};

class NonPositiveGain : public Error {
 public:
  using Error::Error;
};

// Result (or an intermediate) does not fit the representable range, or an
// integer is too large to be resolved at the working precision.
class Overflow : public Error {
 public:
  using Error::Error;
};

class NotNearInteger : public Error {
 public:
  using Error::Error;
};

class FactorBoundExceeded : public Error {
 public:
  using Error::Error;
};

class RoundRecoveryFailure : public Error {
 public:
  using Error::Error;
};

class RecoveryFailure : public Error {
 public:
  using Error::Error;
};

class DuplicatePrimeDetected : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace otakey
