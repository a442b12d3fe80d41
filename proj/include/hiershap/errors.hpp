#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hiershap {

// Raised when an argument violates an operation's preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a requested computation exceeds a configured size limit.
// `required` carries the count that tripped the limit (masks, subset
// combinations or permutations, depending on the caller).
class CapacityError : public std::length_error {
 public:
  CapacityError(const std::string& what, double required, double limit)
      : std::length_error(what), required_(required), limit_(limit) {}

  double required() const { return required_; }
  double limit() const { return limit_; }

 private:
  double required_;
  double limit_;
};

// Raised when a structured input (hierarchy, fixture) fails validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hiershap
