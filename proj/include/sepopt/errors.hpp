#pragma once

#include <stdexcept>
#include <string>

namespace sepopt {

// Invalid or inconsistent configuration (bad key, violated invariant,
// incompatible artifact layout). Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (singular least-squares system, non-finite weights).
// Maps to CLI exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sepopt
