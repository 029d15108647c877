#pragma once

#include <stdexcept>
#include <string>

namespace sobkan {

/// Raised when a suite configuration fails to parse or validate.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an iterative solver fails to converge within its budget.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sobkan
