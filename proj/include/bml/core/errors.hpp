#pragma once

#include <stdexcept>
#include <string>

namespace bml {

// Argument validation failures use std::invalid_argument directly.

/// Thrown when a requested computation exceeds a configured size or step budget.
class resource_limit_error : public std::runtime_error {
public:
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a statistic cannot be computed from incomplete input
/// (for example a truncated geodesic bundle).
class unclassifiable_error : public std::runtime_error {
public:
    explicit unclassifiable_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

inline void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace detail
}  // namespace bml
