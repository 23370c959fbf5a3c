#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace casimir {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the physical domain of an operation
/// (non-positive temperature, zero separation, unstable coupling, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A discrete (delta-line) spectrum was supplied where a continuous
/// spectral density is required.
class DeltaLineError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The operation is not defined for the supplied permittivity model.
class UnsupportedModel : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Gaussian pair weight is not normalizable (alpha1 * alpha2 * phi^2 >= 1).
class InstabilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Zero separation, zero wavenumber or a singular boundary system.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed run or sweep configuration. `path` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace casimir
