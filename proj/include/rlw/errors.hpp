#pragma once

#include <stdexcept>
#include <string>

namespace rlw {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid grid, coefficients, flags or problem setup.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Blow-up, Picard divergence, singular line systems.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace rlw
