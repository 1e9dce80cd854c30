#pragma once

#include <stdexcept>
#include <string>

namespace adl {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or unreadable file.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input file does not match the expected schema (bad cell, no label column, ...).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or argument combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Matrix/vector dimensions disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Non-finite input to a numerical routine.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A requested report cell does not exist.
class MissingCellError : public Error {
public:
    using Error::Error;
};

}  // namespace adl
