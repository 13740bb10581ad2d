#pragma once

#include <stdexcept>
#include <string>

namespace phonon {

// Shape or size disagreement between objects that must share a grid.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration or grid parameters (CFL, spacings, unknown keys).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a kernel.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Failure inside a time-marching solve (blow-up, non-finite values).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent file content.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace phonon
