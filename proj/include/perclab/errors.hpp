#pragma once

#include <stdexcept>
#include <string>

namespace perclab {

// Invalid argument relative to an operation's domain (origin outside the box,
// empty seed set, nonpositive target volume, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Vertex or edge count does not fit the supported address range.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Object is in the wrong state for the request (e.g. no retained uniforms).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Unbounded or otherwise inconsistent half-space system.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact enumeration refused because the instance exceeds the budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed experiment configuration, file format or command line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace perclab
