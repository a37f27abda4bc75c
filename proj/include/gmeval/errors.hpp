#pragma once

#include <stdexcept>
#include <string>

namespace gmeval {

// Two families: InputError means the caller violated a contract (bad file,
// bad argument); ComputeError means valid inputs hit a numerical dead end.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class ComputeError : public Error {
public:
    using Error::Error;
};

class FormatError : public InputError {
public:
    using InputError::InputError;
};

class DataError : public InputError {
public:
    using InputError::InputError;
};

class ArgumentError : public InputError {
public:
    using InputError::InputError;
};

class UsageError : public InputError {
public:
    using InputError::InputError;
};

class InsufficientDataError : public InputError {
public:
    using InputError::InputError;
};

class DomainError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class DegenerateError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class UndefinedCorrelationError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace gmeval
