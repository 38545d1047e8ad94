#pragma once

#include <stdexcept>
#include <string>

namespace fastreact {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (bad extents, unknown keys, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Initial data violate a modelling assumption (nonnegativity, u0 or v0 identically zero, ...).
class AssumptionError : public Error {
public:
    using Error::Error;
};

/// u0 * v0 > 0 at some node.
class SegregationError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

/// Argument outside the domain of a scalar kernel.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operation was called with a violated precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Integrator/solver could not reach the requested tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace fastreact
