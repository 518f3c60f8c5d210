#pragma once

#include <stdexcept>
#include <string>

namespace emloc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dipole model evaluated where it is not valid (at or inside the beacon core).
class DomainError : public Error {
public:
    using Error::Error;
};

// Quantity has no defined value for this input (component sign at zero, octant on a coil plane).
class DegenerateError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Initialization fix outside the usable detection range.
class RangeError : public Error {
public:
    using Error::Error;
};

class ArityError : public Error {
public:
    using Error::Error;
};

class NotInitializedError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class InsufficientEstimatesError : public Error {
public:
    using Error::Error;
};

} // namespace emloc
