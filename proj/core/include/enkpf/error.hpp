#pragma once

#include <stdexcept>
#include <string>

namespace enkpf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ensemble too small or malformed for the requested estimate.
class DegenerateEnsembleError : public Error {
 public:
  using Error::Error;
};

/// Weights that cannot be normalized (all zero, or non-finite).
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

/// A factorization failed or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Model state blew up (NaN or overflow) during propagation.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace enkpf
