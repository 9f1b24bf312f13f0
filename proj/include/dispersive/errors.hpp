#pragma once

#include <stdexcept>
#include <string>

namespace dispersive {

// Bad input or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Singular local systems, non-finite stages, blow-up. Exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dispersive
