#pragma once

#include <stdexcept>
#include <string>

namespace tbea {

// Each category maps onto one CLI exit code (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data (malformed rows, calendar gaps, too few events).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an argument contract, e.g. a split index out of range.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A numerical procedure could not produce a result (singular system, no bracket).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Threshold calibration ran out of surviving replications.
class CalibrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace tbea
