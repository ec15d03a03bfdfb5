#pragma once

#include <stdexcept>
#include <string>

namespace comapipe {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed text input (clinical files, config files).
struct ParseError : Error {
    using Error::Error;
};

// Well-formed input with out-of-range or inconsistent values.
struct ValidationError : Error {
    using Error::Error;
};

// Binary container violates the signal file format.
struct FormatError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Bad pipeline configuration (filter band vs. sample rate, missing stats).
struct ConfigError : Error {
    using Error::Error;
};

// Caller broke an API contract (dimension mismatch, wrong provider input).
struct ContractError : Error {
    using Error::Error;
};

// Numeric problems in the data itself (NaN samples).
struct DataError : Error {
    using Error::Error;
};

struct TrainingError : Error {
    using Error::Error;
};

struct ArgumentError : Error {
    using Error::Error;
};

} // namespace comapipe
