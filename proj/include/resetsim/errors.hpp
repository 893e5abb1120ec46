#pragma once

#include <stdexcept>
#include <string>

namespace resetsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of an operation (non-finite element value,
/// time outside a schedule, unphysical parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The caller violated an API precondition (empty chain, bad grid).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The network sum A + B/Z + CZ + D (or an impedance sum) vanished.
class SingularNetworkError : public Error {
 public:
  using Error::Error;
};

/// A searched-for feature (cutoff crossing, peak) does not exist in the band.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Lossless cavity: the linewidth is zero and the quality factor infinite.
class ZeroLossError : public Error {
 public:
  using Error::Error;
};

/// Population at or above one half has no positive Boltzmann temperature.
class NonThermalError : public Error {
 public:
  using Error::Error;
};

/// The integrator lost positivity; the step was too coarse.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. `field` holds the JSON path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace resetsim
