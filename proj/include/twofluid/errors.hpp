#pragma once

#include <stdexcept>
#include <string>

namespace twofluid {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// R = Q = 0: the closure has no root.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// The safeguarded root solver hit its iteration cap.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

class AxisOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A density left the admissible set min(R, Q) > floor.
class NonPositiveDensity : public Error {
 public:
  using Error::Error;
};

class NonDivergenceFree : public Error {
 public:
  using Error::Error;
};

class InsufficientPoints : public Error {
 public:
  using Error::Error;
};

class NonPositiveValue : public Error {
 public:
  using Error::Error;
};

class FormatVersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptCheckpoint : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Raised by run drivers; carries the simulation time at which a step failed.
class StepFailure : public Error {
 public:
  StepFailure(double time, const std::string& what)
      : Error("t=" + std::to_string(time) + ": " + what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace twofluid
