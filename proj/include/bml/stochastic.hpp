#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "bml/core/errors.hpp"
#include "bml/core/grid_path.hpp"
#include "bml/core/rng.hpp"

namespace bml {

// =============================================================================
// Gaussian building blocks
// =============================================================================

/// Brownian bridge of length `duration` on n uniform grid points, multiplied
/// by `scale`. Endpoints are exactly 0.
inline GridPath sample_bridge(std::size_t n, double duration, double scale, RngStream& rng) {
    detail::require(n >= 2, "sample_bridge: n must be >= 2");
    detail::require(duration > 0.0 && std::isfinite(duration), "sample_bridge: duration must be positive");
    GridPath p;
    p.kind = PathKind::bridge;
    p.times = uniform_grid(n, duration);
    p.values.assign(n, 0.0);
    const double sd = scale * std::sqrt(duration / static_cast<double>(n - 1));
    // Brownian motion on the grid, then subtract the linear interpolant of the endpoint.
    for (std::size_t i = 1; i < n; ++i) p.values[i] = p.values[i - 1] + sd * rng.normal();
    const double end = p.values.back();
    for (std::size_t i = 0; i < n; ++i) p.values[i] -= end * p.times[i] / duration;
    p.values.front() = 0.0;
    p.values.back() = 0.0;
    return p;
}

/// Brownian excursion of the given length on n grid points, obtained by the
/// Vervaat transform: cyclically rotate a bridge so that its argmin sits at
/// time 0 and shift it up by the minimum.
inline GridPath sample_excursion(std::size_t n, double length, RngStream& rng) {
    detail::require(n >= 2, "sample_excursion: n must be >= 2");
    detail::require(length > 0.0 && std::isfinite(length), "sample_excursion: length must be positive");
    GridPath bridge = sample_bridge(n, length, 1.0, rng);
    const std::size_t m = n - 1;  // number of increments; index m is identified with 0
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (bridge.values[i] < bridge.values[argmin]) argmin = i;
    GridPath e;
    e.kind = PathKind::excursion;
    e.times = std::move(bridge.times);
    e.values.resize(n);
    const double base = bridge.values[argmin];
    for (std::size_t i = 0; i < n; ++i) {
        const double v = bridge.values[(argmin + i) % m] - base;
        e.values[i] = std::max(0.0, v);
    }
    e.values.front() = 0.0;
    e.values.back() = 0.0;
    return e;
}

/// Lifetime process X together with Brownian-snake labels Y.
struct BrownianSnakeSample {
    GridPath x_path;
    std::vector<double> y_values;
    std::size_t s_star_index = 0;
    /// The minimum of Y is attained at more than one grid index.
    bool argmin_tie = false;
    /// X vanished identically, so Y was set to zero.
    bool degenerate = false;

    [[nodiscard]] std::size_t size() const noexcept { return y_values.size(); }
    [[nodiscard]] double y_min() const { return y_values[s_star_index]; }
};

namespace detail {

inline void locate_label_minimum(BrownianSnakeSample& s) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.y_values.size(); ++i)
        if (s.y_values[i] < s.y_values[best]) best = i;
    s.s_star_index = best;
    s.argmin_tie = false;
    for (std::size_t i = best + 1; i < s.y_values.size(); ++i)
        if (s.y_values[i] == s.y_values[best]) s.argmin_tie = true;
}

}  // namespace detail

/// Gaussian labels with cov(Y_i, Y_j) = min of X over grid indices [i, j].
///
/// Ancestral-spine stack: the stack holds knots (level, label) along the
/// genealogical line of the current grid point, strictly increasing in level.
/// Stepping from i to i+1 first pops knots above m = min(X_i, X_{i+1}); the
/// label at level m is drawn from the Brownian bridge between the bracketing
/// knots, then Y_{i+1} adds an independent N(0, X_{i+1} - m). O(n) amortized.
inline BrownianSnakeSample sample_snake_labels(const GridPath& x_path, RngStream& rng) {
    validate(x_path);
    detail::require(x_path.kind == PathKind::excursion, "sample_snake_labels: x_path must be an excursion");
    BrownianSnakeSample out;
    out.x_path = x_path;
    const auto& x = x_path.values;
    const std::size_t n = x.size();
    out.y_values.assign(n, 0.0);
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) {
        out.degenerate = true;
        detail::locate_label_minimum(out);
        return out;
    }

    struct Knot {
        double level;
        double label;
    };
    std::vector<Knot> spine;
    spine.reserve(64);
    spine.push_back({0.0, 0.0});
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double m = std::min(x[i], x[i + 1]);
        bool popped = false;
        Knot above{0.0, 0.0};
        while (spine.back().level > m) {
            above = spine.back();
            spine.pop_back();
            popped = true;
        }
        const Knot below = spine.back();
        if (below.level < m) {
            double ym = below.label;
            if (popped) {
                const double span = above.level - below.level;
                const double frac = (m - below.level) / span;
                const double var = (m - below.level) * (above.level - m) / span;
                ym = below.label + frac * (above.label - below.label) + std::sqrt(std::max(var, 0.0)) * rng.normal();
            }
            spine.push_back({m, ym});
        }
        const Knot base = spine.back();
        const double rise = x[i + 1] - m;
        const double y_next = base.label + std::sqrt(rise) * rng.normal();
        out.y_values[i + 1] = rise > 0.0 ? y_next : base.label;
        if (rise > 0.0) spine.push_back({x[i + 1], out.y_values[i + 1]});
    }
    out.y_values.front() = 0.0;
    out.y_values.back() = 0.0;
    detail::locate_label_minimum(out);
    return out;
}

/// Excursion of length 1 on n points plus its snake labels.
inline BrownianSnakeSample sample_brownian_snake(std::size_t n, RngStream& rng) {
    return sample_snake_labels(sample_excursion(n, 1.0, rng), rng);
}

// =============================================================================
// Spectrally positive stable increments
// =============================================================================

/// Increment over time dt of the alpha-stable Levy process with no negative
/// jumps and Laplace exponent c*lambda^alpha, i.e.
///     E[exp(-lambda * delta)] = exp(dt * c * lambda^alpha).
/// Chambers-Mallows-Stuck with skewness +1; the scale satisfies
/// sigma^alpha = dt * c * |cos(pi alpha / 2)|.
inline double sample_stable_increment(double alpha, double c, double dt, RngStream& rng) {
    detail::require(alpha > 1.0 && alpha < 2.0, "sample_stable_increment: alpha must lie in (1, 2)");
    detail::require(c > 0.0, "sample_stable_increment: c must be positive");
    detail::require(dt > 0.0, "sample_stable_increment: dt must be positive");
    const double half_pi = 0.5 * std::numbers::pi;
    const double tan_term = std::tan(half_pi * alpha);
    const double shift = std::atan(tan_term) / alpha;
    const double stretch = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * alpha));
    const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
    const double w = rng.exponential();
    const double a = alpha * (v + shift);
    const double standard = stretch * std::sin(a) / std::pow(std::cos(v), 1.0 / alpha) *
                            std::pow(std::cos(v - a) / w, (1.0 - alpha) / alpha);
    const double sigma = std::pow(dt * c * std::abs(std::cos(half_pi * alpha)), 1.0 / alpha);
    return sigma * standard;
}

}  // namespace bml
