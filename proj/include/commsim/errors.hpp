#pragma once

#include <stdexcept>
#include <string>

namespace commsim {

/// Bad input data (negative weights, malformed vectors, unparsable specs).
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally valid input that cannot be run (too few clients, infeasible sizes).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A message stream that breaks the communication contract.
struct protocol_error : std::runtime_error {
    explicit protocol_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace commsim
