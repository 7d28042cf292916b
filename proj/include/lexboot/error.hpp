#pragma once

#include <stdexcept>
#include <string>

namespace lexboot {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, records, request bodies).
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or parameter values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An operation that is not legal in the current state.
class StateError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace lexboot
