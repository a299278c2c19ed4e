#pragma once

#include <stdexcept>
#include <string>

namespace hsg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Failures of a numerical routine (the CLI maps these to exit code 3).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
public:
  using Error::Error;
};

class LevelTooLarge : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// The threshold set would exceed the enumeration cap.
class ThresholdTooSmall : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotDownwardClosed : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Raised by a parametric map that cannot be evaluated at a point.
class EvaluationFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class EmptyAllocation : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class UnsupportedSmoothness : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NotPositiveDefinite : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class QuadratureNonconvergence : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularSystem : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// The quadrature of the posterior density is not positive.
class DegenerateNormalization : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace hsg
