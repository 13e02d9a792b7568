#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gemmforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid value for a typed field. `field` is a dotted path into the
// offending document or parameter set (e.g. "versal_devices[0].bram36_total").
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A solver found no feasible point; the message names the binding constraint.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace gemmforge
