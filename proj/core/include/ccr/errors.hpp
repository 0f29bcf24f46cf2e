#pragma once

#include <stdexcept>
#include <string>

namespace ccr {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input matrix or vector contains NaN or Inf.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// A matrix that must have orthonormal columns does not.
class NotOrthonormalError : public Error {
public:
    using Error::Error;
};

/// A spectrum endpoint needed in a ratio is zero or negative.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// Derived problem dimensions are empty or inconsistent.
class InvalidDimsError : public Error {
public:
    using Error::Error;
};

/// Operand shapes do not match the operation's contract.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The structural disturbance vanished and cannot be rescaled.
class DegenerateDisturbanceError : public Error {
public:
    using Error::Error;
};

/// A diagonal weight cannot be inverted at the configured tolerance.
class SingularWeightError : public Error {
public:
    using Error::Error;
};

/// Ground truth is required by the operation but absent.
class TruthRequiredError : public Error {
public:
    using Error::Error;
};

/// Scalar inputs outside the admissible domain.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (open/read/write).
class IoError : public Error {
public:
    using Error::Error;
};

/// A file parsed but its content violates the format contract.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A CSV header or field does not match the fixed schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Configuration document invalid (unknown key, bad value).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ccr
