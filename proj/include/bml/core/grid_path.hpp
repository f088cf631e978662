#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string_view>
#include <vector>

#include "bml/core/errors.hpp"

namespace bml {

enum class PathKind { bridge, excursion, levy, csbp, generic };

inline std::string_view to_string(PathKind k) {
    switch (k) {
        case PathKind::bridge: return "bridge";
        case PathKind::excursion: return "excursion";
        case PathKind::levy: return "levy";
        case PathKind::csbp: return "csbp";
        case PathKind::generic: return "generic";
    }
    return "generic";
}

/// A sampled path: process values on an increasing time grid starting at 0.
struct GridPath {
    std::vector<double> times;
    std::vector<double> values;
    PathKind kind = PathKind::generic;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] bool empty() const noexcept { return times.empty(); }
    [[nodiscard]] double duration() const noexcept { return times.empty() ? 0.0 : times.back(); }

    [[nodiscard]] double sup() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    /// Right-continuous step evaluation: value at the last grid time <= t.
    /// Times past the end return the final value.
    [[nodiscard]] double value_at(double t) const {
        detail::require(!times.empty(), "value_at on empty path");
        auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return values.front();
        return values[static_cast<std::size_t>(std::distance(times.begin(), it)) - 1];
    }
};

/// Throws std::invalid_argument describing the first violated invariant.
inline void validate(const GridPath& p) {
    detail::require(p.times.size() == p.values.size(), "path times/values length mismatch");
    detail::require(!p.times.empty(), "path is empty");
    detail::require(p.times.front() == 0.0, "path must start at time 0");
    for (std::size_t i = 1; i < p.times.size(); ++i)
        detail::require(p.times[i] > p.times[i - 1], "path times must be strictly increasing");
    for (double v : p.values) detail::require(std::isfinite(v), "path values must be finite");
    if (p.kind == PathKind::excursion) {
        detail::require(p.values.front() == 0.0 && p.values.back() == 0.0, "excursion endpoints must be 0");
        for (double v : p.values) detail::require(v >= 0.0, "excursion values must be nonnegative");
    }
}

/// CSV with header `time,value`, full double precision.
inline void write_csv(std::ostream& os, const GridPath& p) {
    const auto old = os.precision(17);
    os << "time,value\n";
    for (std::size_t i = 0; i < p.size(); ++i) os << p.times[i] << ',' << p.values[i] << '\n';
    os.precision(old);
}

/// Uniform grid of n points on [0, duration].
inline std::vector<double> uniform_grid(std::size_t n, double duration) {
    std::vector<double> t(n);
    const double h = duration / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) t[i] = h * static_cast<double>(i);
    t.back() = duration;
    return t;
}

}  // namespace bml
