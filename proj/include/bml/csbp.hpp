#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bml/core/errors.hpp"
#include "bml/core/grid_path.hpp"
#include "bml/core/rng.hpp"
#include "bml/stochastic.hpp"

namespace bml {

// =============================================================================
// alpha-stable CSBPs: closed forms
// =============================================================================
//
// Convention: the CSBP with parameters (alpha, c) is the one whose Laplace
// functional is E[exp(-lambda Y_t) | Y_0] = exp(-Y_0 u_t(lambda)) with
//     u_t(lambda) = (lambda^{1-alpha} + c t)^{1/(1-alpha)}.
// That u_t solves du/dt = -psi(u) for psi(lambda) = c lambda^alpha / (alpha-1),
// so the driving Levy process is simulated with that Laplace exponent.

struct StableParams {
    double alpha = 1.5;
    double c = 1.0;
};

inline void validate(const StableParams& p) {
    detail::require(p.alpha > 1.0 && p.alpha < 2.0, "alpha must lie in (1, 2)");
    detail::require(p.c > 0.0 && std::isfinite(p.c), "c must be positive");
}

/// Laplace exponent of the Levy process driving the CSBP.
inline double branching_mechanism(double alpha, double c, double lambda) {
    return c * std::pow(lambda, alpha) / (alpha - 1.0);
}

inline double u_t(double alpha, double c, double lambda, double t) {
    detail::require(lambda >= 0.0, "u_t: lambda must be >= 0");
    detail::require(t >= 0.0, "u_t: t must be >= 0");
    if (lambda == 0.0) return 0.0;
    if (std::isinf(lambda)) return t > 0.0 ? std::pow(c * t, 1.0 / (1.0 - alpha)) : lambda;
    if (t == 0.0) return lambda;
    return std::pow(std::pow(lambda, 1.0 - alpha) + c * t, 1.0 / (1.0 - alpha));
}

/// P[zeta > t] for the CSBP started from y0.
inline double extinction_prob(double alpha, double c, double y0, double t) {
    detail::require(t > 0.0, "extinction_prob: t must be positive");
    detail::require(y0 >= 0.0, "extinction_prob: y0 must be >= 0");
    if (y0 == 0.0) return 0.0;
    if (std::isinf(t)) return 0.0;
    return -std::expm1(-std::pow(c * t, 1.0 / (1.0 - alpha)) * y0);
}

/// E[exp(-lambda Y_t)] from y0.
inline double csbp_laplace(double alpha, double c, double y0, double lambda, double t) {
    return std::exp(-y0 * u_t(alpha, c, lambda, t));
}

/// Normalization window for the excursion-lifetime law.
struct LifetimeWindow {
    double t_min = 1.0;
    double t_max = 2.0;
};

/// CDF of the CSBP excursion lifetime, density proportional to
/// t^{1/(1-alpha) - 1}, restricted and normalized to the window.
inline double csbp_excursion_lifetime_cdf(double alpha, double t, LifetimeWindow w) {
    detail::require(0.0 < w.t_min && w.t_min < w.t_max, "lifetime window must satisfy 0 < t_min < t_max");
    detail::require(t >= w.t_min && t <= w.t_max, "lifetime cdf: t outside window");
    const double p = 1.0 / (1.0 - alpha);  // antiderivative t^p / p, p < 0
    const double lo = std::pow(w.t_min, p);
    return (lo - std::pow(t, p)) / (lo - std::pow(w.t_max, p));
}

// =============================================================================
// Paths and the Lamperti time changes
// =============================================================================

struct LevyPath {
    double alpha = 1.5;
    double c = 1.0;
    GridPath path;
    /// Last value was the first nonpositive one (or fell below the floor).
    bool absorbed = false;
};

struct CsbpPath {
    double alpha = 1.5;
    double c = 1.0;
    GridPath path;
    std::optional<std::size_t> extinction_index;

    [[nodiscard]] double value_at(double t) const { return path.value_at(t); }
    [[nodiscard]] std::optional<double> extinction_time() const {
        if (!extinction_index) return std::nullopt;
        return path.times[*extinction_index];
    }
};

namespace detail {

// Logarithmic mean (b - a) / ln(b / a) of two positive numbers.
inline double log_mean(double a, double b) {
    const double r = b / a - 1.0;
    if (std::abs(r) < 1e-4) return a * (1.0 + r * (0.5 - r * (1.0 / 12.0 - r / 24.0)));
    return (b - a) / std::log(b / a);
}

// CSBP time elapsed over one Levy step from x0 > 0 to x1 > 0 taking Levy
// time ds, for the path interpolated linearly in Levy time. The inverse map
// multiplies by the same logarithmic mean, so the two are exact inverses.
inline double forward_clock_step(double x0, double x1, double ds) { return ds / log_mean(x0, x1); }

// Final step into 0. The process creeps down to 0 like (S - s)^{1/alpha}, so
// the clock integral from x0 over the remaining Levy time r is
// alpha/(alpha-1) * r / x0. The crossing time is linearly interpolated.
inline double absorbing_clock_step(double alpha, double x0, double remaining) {
    return alpha / (alpha - 1.0) * remaining / x0;
}

inline double absorbing_fraction(double x0, double x1) { return x1 <= 0.0 ? x0 / (x0 - x1) : 1.0; }

}  // namespace detail

/// Levy path to CSBP path: Y_t = X_{s(t)} with s the inverse of the clock
/// int_0^s dr / X_r, evaluated exactly for the linear interpolant in s. The
/// path must be positive up to its last point; an absorbed final point
/// becomes a 0 at the interpolated crossing clock.
inline CsbpPath lamperti_levy_to_csbp(const LevyPath& lp) {
    const auto& s = lp.path.times;
    const auto& x = lp.path.values;
    detail::require(!s.empty(), "lamperti_levy_to_csbp: empty path");
    detail::require(s.size() == x.size(), "lamperti_levy_to_csbp: malformed path");
    CsbpPath out;
    out.alpha = lp.alpha;
    out.c = lp.c;
    out.path.kind = PathKind::csbp;
    const std::size_t n = s.size();
    const std::size_t live = lp.absorbed ? n - 1 : n;
    for (std::size_t k = 0; k < live; ++k)
        detail::require(x[k] > 0.0, "lamperti_levy_to_csbp: path must stay positive before absorption");
    out.path.times.reserve(n);
    out.path.values.reserve(n);
    double clock = 0.0;
    for (std::size_t k = 0; k < live; ++k) {
        if (k > 0) clock += detail::forward_clock_step(x[k - 1], x[k], s[k] - s[k - 1]);
        out.path.times.push_back(clock);
        out.path.values.push_back(x[k]);
    }
    if (lp.absorbed) {
        if (n == 1) {
            out.path.times.push_back(0.0);
            out.path.values.push_back(0.0);
        } else {
            const double f = detail::absorbing_fraction(x[n - 2], x[n - 1]);
            clock += detail::absorbing_clock_step(lp.alpha, x[n - 2], f * (s[n - 1] - s[n - 2]));
            out.path.times.push_back(clock);
            out.path.values.push_back(0.0);
        }
        out.extinction_index = out.path.size() - 1;
    }
    return out;
}

/// CSBP path to Levy path: X_s = Y_{t(s)} with t the inverse of the clock
/// int_0^t Y_r dr. The extinction segment uses the same creeping profile as
/// the forward map, so the two clocks are mutual inverses there.
inline LevyPath lamperti_csbp_to_levy(const CsbpPath& cp) {
    const auto& t = cp.path.times;
    const auto& y = cp.path.values;
    detail::require(!t.empty(), "lamperti_csbp_to_levy: empty path");
    detail::require(t.size() == y.size(), "lamperti_csbp_to_levy: malformed path");
    for (double v : y) detail::require(v >= 0.0, "lamperti_csbp_to_levy: CSBP values must be >= 0");
    LevyPath out;
    out.alpha = cp.alpha;
    out.c = cp.c;
    out.path.kind = PathKind::levy;
    const std::size_t end = cp.extinction_index ? *cp.extinction_index + 1 : t.size();
    double clock = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        if (k > 0) {
            if (y[k] == 0.0 && y[k - 1] > 0.0)
                clock += (cp.alpha - 1.0) / cp.alpha * (t[k] - t[k - 1]) * y[k - 1];
            else
                clock += (t[k] - t[k - 1]) * detail::log_mean(y[k - 1], y[k]);
        }
        out.path.times.push_back(clock);
        out.path.values.push_back(y[k]);
        if (y[k] == 0.0) {
            out.absorbed = true;
            break;
        }
    }
    return out;
}

/// Discretization controls for Levy/CSBP simulation.
struct LevySimulationOptions {
    /// Largest Levy time step.
    double dt = 1e-3;
    /// Near 0 the step is shrunk so the increment scale stays below
    /// `refine * X`; keeps crossings from being skipped between grid points.
    double refine = 0.25;
    /// Values below floor * x0 count as absorbed.
    double floor = 1e-9;
    std::size_t max_steps = 50'000'000;
};

/// Levy path with Laplace exponent psi = branching_mechanism(alpha, c, .)
/// started at x0 > 0, stopped at the first nonpositive value or once the
/// forward Lamperti clock reaches `clock_horizon`.
inline LevyPath sample_levy_to_absorption(StableParams params, double x0, double clock_horizon,
                                          const LevySimulationOptions& opt, RngStream& rng) {
    validate(params);
    detail::require(x0 > 0.0, "sample_levy_to_absorption: x0 must be positive");
    detail::require(opt.dt > 0.0, "dt must be positive");
    const double alpha = params.alpha;
    const double psi_c = params.c / (alpha - 1.0);
    // Scale of a unit stable increment over ds is (psi_c * ds)^{1/alpha} up to a constant.
    const double refine_pow = std::pow(opt.refine, alpha) / psi_c;
    const double floor = opt.floor * x0;

    LevyPath lp;
    lp.alpha = alpha;
    lp.c = params.c;
    lp.path.kind = PathKind::levy;
    lp.path.times.push_back(0.0);
    lp.path.values.push_back(x0);
    double s = 0.0, x = x0, clock = 0.0;
    std::size_t steps = 0;
    while (clock < clock_horizon) {
        if (++steps > opt.max_steps)
            throw resource_limit_error("Levy simulation exceeded the step budget of " + std::to_string(opt.max_steps));
        const double ds = std::min(opt.dt, refine_pow * std::pow(x, alpha));
        const double next = x + sample_stable_increment(alpha, psi_c, ds, rng);
        s += ds;
        if (next <= floor) {
            lp.path.times.push_back(s);
            lp.path.values.push_back(next > 0.0 ? 0.0 : next);
            lp.absorbed = true;
            break;
        }
        clock += detail::forward_clock_step(x, next, ds);
        x = next;
        lp.path.times.push_back(s);
        lp.path.values.push_back(x);
    }
    return lp;
}

/// CSBP from y0 observed up to at least `horizon` (or extinction), via the
/// Levy route: stable increments, absorption, forward Lamperti clock.
inline CsbpPath sample_csbp(double alpha, double c, double y0, double horizon, double dt, RngStream& rng,
                            LevySimulationOptions opt = {}) {
    validate(StableParams{alpha, c});
    detail::require(y0 >= 0.0, "sample_csbp: y0 must be >= 0");
    detail::require(dt > 0.0, "sample_csbp: dt must be positive");
    detail::require(horizon >= 0.0, "sample_csbp: horizon must be >= 0");
    if (y0 == 0.0) {
        CsbpPath cp;
        cp.alpha = alpha;
        cp.c = c;
        cp.path.kind = PathKind::csbp;
        cp.path.times = {0.0};
        cp.path.values = {0.0};
        cp.extinction_index = 0;
        return cp;
    }
    opt.dt = dt;
    return lamperti_levy_to_csbp(sample_levy_to_absorption({alpha, c}, y0, horizon, opt, rng));
}

// =============================================================================
// Merge point process
// =============================================================================

/// Poisson points on [0,1] x [x_min, inf) with intensity ds (x) x^{-3} dx.
/// merge_depth(a, b) is the largest x among points with s in (a, b).
class MergePPP {
public:
    struct Point {
        double s;
        double x;
    };

    MergePPP(std::vector<Point> points, double x_min) : x_min_(x_min), points_(std::move(points)) {
        detail::require(x_min > 0.0, "MergePPP: x_min must be positive");
        for (const auto& p : points_)
            detail::require(p.x >= x_min && p.s >= 0.0 && p.s <= 1.0, "MergePPP: point outside the domain");
        std::sort(points_.begin(), points_.end(), [](const Point& a, const Point& b) { return a.s < b.s; });
        build_sparse_table();
    }

    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] const std::vector<Point>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }

    /// Expected number of points, (1/2) x_min^{-2}.
    [[nodiscard]] double expected_count() const noexcept { return 0.5 / (x_min_ * x_min_); }

    /// Number of points with s in [0, len] and x >= w.
    [[nodiscard]] std::size_t count_above(double w, double len = 1.0) const {
        std::size_t k = 0;
        for (const auto& p : points_)
            if (p.s <= len && p.x >= w) ++k;
        return k;
    }

    struct Query {
        double depth;
        /// No point in (a, b): the true depth lies below x_min.
        bool below_truncation;
    };

    /// Symmetric in (a, b); a == b is rejected.
    [[nodiscard]] Query query(double a, double b) const {
        detail::require(a != b, "merge_depth: a and b must differ");
        if (a > b) std::swap(a, b);
        const auto lo = std::upper_bound(points_.begin(), points_.end(), a,
                                         [](double v, const Point& p) { return v < p.s; });
        const auto hi = std::lower_bound(points_.begin(), points_.end(), b,
                                         [](const Point& p, double v) { return p.s < v; });
        if (lo >= hi) return {0.0, true};
        const auto i = static_cast<std::size_t>(lo - points_.begin());
        const auto j = static_cast<std::size_t>(hi - points_.begin());  // exclusive
        return {range_max(i, j), false};
    }

private:
    void build_sparse_table() {
        const std::size_t n = points_.size();
        table_.clear();
        if (n == 0) return;
        table_.emplace_back(n);
        for (std::size_t i = 0; i < n; ++i) table_[0][i] = points_[i].x;
        for (std::size_t k = 1; (std::size_t{1} << k) <= n; ++k) {
            const std::size_t half = std::size_t{1} << (k - 1);
            const std::size_t len = n - (std::size_t{1} << k) + 1;
            std::vector<double> row(len);
            for (std::size_t i = 0; i < len; ++i) row[i] = std::max(table_[k - 1][i], table_[k - 1][i + half]);
            table_.push_back(std::move(row));
        }
    }

    [[nodiscard]] double range_max(std::size_t i, std::size_t j) const {
        const std::size_t len = j - i;
        std::size_t k = 0;
        while ((std::size_t{2} << k) <= len) ++k;
        return std::max(table_[k][i], table_[k][j - (std::size_t{1} << k)]);
    }

    double x_min_;
    std::vector<Point> points_;
    std::vector<std::vector<double>> table_;
};

/// Points arrive in decreasing x: in the mass coordinate m = 1/(2x^2) they
/// form a unit-rate Poisson process, stopped at m = 1/(2 x_min^2).
inline MergePPP sample_merge_ppp(double x_min, RngStream& rng) {
    detail::require(x_min > 0.0, "sample_merge_ppp: x_min must be positive");
    const double m_max = 0.5 / (x_min * x_min);
    std::vector<MergePPP::Point> pts;
    pts.reserve(static_cast<std::size_t>(m_max + 4.0 * std::sqrt(m_max) + 8.0));
    double m = rng.exponential();
    while (m <= m_max) {
        const double x = std::max(x_min, 1.0 / std::sqrt(2.0 * m));
        pts.push_back({rng.uniform(), x});
        m += rng.exponential();
    }
    return MergePPP(std::move(pts), x_min);
}

inline double merge_depth(const MergePPP& ppp, double a, double b) { return ppp.query(a, b).depth; }

}  // namespace bml
