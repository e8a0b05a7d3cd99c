#pragma once

#include <stdexcept>
#include <string>

namespace kesten {

// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unreadable input or unwritable output (exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mathematically undefined request, e.g. a non-stationary process (exit code 4).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An estimator could not produce a value from the data it was given (exit code 4).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kesten
