#pragma once

#include <stdexcept>
#include <string>

namespace keyagree {

// Invalid or inconsistent arguments (dimension mismatches, out-of-range
// parameters, malformed configurations).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A parameter combination the library deliberately does not realize
// (e.g. an alphabet too small for the requested code). Callers may fall
// back to another construction.
class UnsupportedParameters : public ParameterError {
public:
    explicit UnsupportedParameters(const std::string& what) : ParameterError(what) {}
};

// An operation would exceed a configured enumeration/materialization cap.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A protocol run reached a state that budget-respecting adversaries cannot
// cause (no decodable branch, or several). Reachable only under over-budget
// injection; reported, never silently absorbed.
class ProtocolFailure : public std::runtime_error {
public:
    explicit ProtocolFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace keyagree
