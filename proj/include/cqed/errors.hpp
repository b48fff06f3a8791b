#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid physical parameters or sweep specification.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Operator or state dimensions disagree, or a dimension cap was exceeded.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression was evaluated where its denominator vanishes.
class DivisionDomain : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// More than one independent stationary state was found.
class DegenerateNullSpace : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator could not continue; `time()` is where it stopped.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Gain equals or exceeds loss on the requested branch (kappa - R*I <= 0).
class PoleDomain : public Error {
 public:
  using Error::Error;
};

class NoPhysicalRoot : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cqed
