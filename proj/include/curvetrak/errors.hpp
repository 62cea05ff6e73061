#pragma once

#include <stdexcept>
#include <string>

namespace curvetrak {

/// Agents coincide (or nearly so); the inter-agent direction is undefined.
struct DegenerateFrameError : std::runtime_error {
    explicit DegenerateFrameError(const std::string& what) : std::runtime_error(what) {}
};

/// Gradient norm below grad_floor; normal direction and curvature are undefined.
struct CriticalPointError : std::runtime_error {
    explicit CriticalPointError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file missing, unreadable, or violating the schema.
/// The message names the offending key.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace curvetrak
