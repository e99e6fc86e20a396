#pragma once

#include <stdexcept>
#include <string>

namespace dpsi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument to a library operation (mixed fields, repeated x, out of range).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Arithmetic outside the operation's domain, e.g. inverting zero.
class DomainError : public Error {
public:
    using Error::Error;
};

// A hash-table bin received more real elements than its capacity.
class OverflowError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

// Malformed wire bytes, transcript files or set files.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dpsi
