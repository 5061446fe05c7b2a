#pragma once

#include <stdexcept>
#include <string>

namespace fracblow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (gamma(0), t >= T, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Value too large to represent in double precision.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A parameter record violates its invariants (alpha outside (0,1), beta <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Two series/fields live on different meshes or grids.
class MeshMismatchError : public Error {
 public:
  using Error::Error;
};

/// A truncated series could not be made to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A solver could not complete (Newton failure, NaN, negative density, ...).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Inputs to a checker do not satisfy its stated precondition.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Bad command line or configuration file.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracblow
