#pragma once

#include <stdexcept>
#include <string>

namespace effortrank {

// Base for every error raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration: missing columns, invalid flags, bad ranges.
class ConfigError : public Error {
public:
    using Error::Error;
};

class SchemaError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// Precondition violated on data handed to an algorithm (single-class training
// set, zero-variance skewness input, degenerate Popt normalization, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace effortrank
