#pragma once

#include <stdexcept>
#include <string>

namespace idrr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration: bad keys, enumerated-choice violations, missing paths.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Anything wrong with corpus contents.
class DataError : public Error {
public:
    using Error::Error;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class LabelSpaceError : public DataError {
public:
    using DataError::DataError;
};

class DegenerateInstanceError : public DataError {
public:
    using DataError::DataError;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ProviderError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

}  // namespace idrr
