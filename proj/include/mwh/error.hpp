#pragma once

#include <stdexcept>
#include <string>

namespace mwh {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, parameter values, or command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (files, series).
class DataError : public Error {
public:
    using Error::Error;
};

/// A quantity that is mathematically undefined for the given inputs
/// (zero observed mean, zero variance, degenerate flux fractions).
class ComputeError : public Error {
public:
    using Error::Error;
};

}  // namespace mwh
