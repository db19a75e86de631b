#pragma once

#include <stdexcept>
#include <string>

namespace cpd {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller-supplied argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A field or metric evaluated where it is singular (Coulomb origin, zero B,
/// vanishing reference norm).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Trajectory left the finite range guarded by the blow-up threshold.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

/// The adaptive reference solver ran out of step budget.
class MaxStepsError : public Error {
 public:
  MaxStepsError(const std::string& what, double t_reached)
      : Error(what), t_reached_(t_reached) {}
  double t_reached() const { return t_reached_; }

 private:
  double t_reached_;
};

}  // namespace cpd
