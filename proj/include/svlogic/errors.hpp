#pragma once

#include <stdexcept>
#include <string>

namespace svl {

/// Base for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class UnphysicalPolarization : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// The nodal system could not be factorized; `what()` names the floating nodes when known.
class SingularCircuit : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Aborted time loop. Carries the step at which the run failed.
class PhysicsAbort : public Error {
 public:
  PhysicsAbort(const std::string& what, long step) : Error(what + " at step " + std::to_string(step)), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace svl
