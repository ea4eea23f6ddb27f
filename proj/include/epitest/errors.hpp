#pragma once

#include <stdexcept>
#include <string>

namespace epitest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file layout is wrong: missing columns, unknown schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Input values are unusable: duplicates, negative counts, bad dates.
class DataError : public Error {
public:
    using Error::Error;
};

/// A region cannot enter an analysis (no valid window, never crosses a threshold).
class ExclusionError : public DataError {
public:
    using DataError::DataError;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or command-line usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace epitest
