#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bml/core/errors.hpp"

namespace bml::stats {

/// Streaming mean and variance (Welford).
class Accumulator {
public:
    void add(double x) noexcept {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const Accumulator& o) noexcept {
        if (o.n_ == 0) return;
        const double n = static_cast<double>(n_ + o.n_);
        const double d = o.mean_ - mean_;
        mean_ += d * static_cast<double>(o.n_) / n;
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
        n_ += o.n_;
    }
    [[nodiscard]] std::size_t count() const noexcept { return n_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] double variance() const noexcept {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    [[nodiscard]] double stderr_mean() const noexcept {
        return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

inline Accumulator summarize(std::span<const double> xs) {
    Accumulator acc;
    for (double x : xs) acc.add(x);
    return acc;
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. Ties are handled
/// by advancing both samples past equal values before comparing.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    detail::require(!a.empty() && !b.empty(), "ks_two_sample needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// One-sample KS statistic against a continuous CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> a, Cdf&& cdf) {
    detail::require(!a.empty(), "ks_one_sample needs a nonempty sample");
    std::sort(a.begin(), a.end());
    const double n = static_cast<double>(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    return d;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size() && x.size() >= 2, "least_squares needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    detail::require(sxx > 0.0, "least_squares: degenerate abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

/// Weighted isotonic (nondecreasing) regression by pool-adjacent-violators.
inline std::vector<double> isotonic_fit(std::span<const double> y, std::span<const double> w) {
    detail::require(y.size() == w.size(), "isotonic_fit: size mismatch");
    struct Block {
        double value, weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < y.size(); ++i) {
        blocks.push_back({y[i], w[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].value > blocks.back().value) {
            Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double tw = prev.weight + top.weight;
            prev.value = tw > 0 ? (prev.value * prev.weight + top.value * top.weight) / tw : prev.value;
            prev.weight = tw;
            prev.count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.value);
    return out;
}

/// Fraction of weighted absolute mass the isotonic fit has to move:
/// sum w|fit - y| / sum w|y|. Zero for an already nondecreasing sequence.
inline double monotone_violation_mass(std::span<const double> y, std::span<const double> w) {
    const auto fit = isotonic_fit(y, w);
    double moved = 0, total = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        moved += w[i] * std::abs(fit[i] - y[i]);
        total += w[i] * std::abs(y[i]);
    }
    return total > 0 ? moved / total : 0.0;
}

/// Pearson chi-square statistic of observed counts against equal expected counts.
inline double chi_square_uniform(std::span<const std::size_t> counts) {
    double total = 0;
    for (auto c : counts) total += static_cast<double>(c);
    const double expected = total / static_cast<double>(counts.size());
    double chi2 = 0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

/// Upper quantile of the chi-square law with `dof` degrees of freedom at
/// standard-normal level z (Wilson-Hilferty). z = 3.09 is the 0.999 quantile.
inline double chi_square_quantile(double dof, double z) {
    const double a = 2.0 / (9.0 * dof);
    const double c = 1.0 - a + z * std::sqrt(a);
    return dof * c * c * c;
}

}  // namespace bml::stats
