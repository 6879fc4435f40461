#pragma once

#include <stdexcept>
#include <string>

namespace coagfrag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: rejected at construction or load time.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluation produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Operation requested for a family without the needed closed form.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Objects from incompatible grids combined, or a similar caller bug.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ProjectionError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Step size collapsed below the stepper floor.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace coagfrag
