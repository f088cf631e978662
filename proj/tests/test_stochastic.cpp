#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bml/core/stats.hpp"
#include "bml/stochastic.hpp"

using namespace bml;

TEST(Bridge, EndpointsAndCovariance) {
    constexpr std::size_t n = 101, reps = 20000;
    const double duration = 2.0;
    stats::Accumulator var_q, var_h, cov;
    for (std::size_t r = 0; r < reps; ++r) {
        auto rng = derive_stream(1, "bridge", r);
        const auto b = sample_bridge(n, duration, 1.0, rng);
        ASSERT_EQ(b.values.front(), 0.0);
        ASSERT_EQ(b.values.back(), 0.0);
        var_q.add(b.values[25] * b.values[25]);
        var_h.add(b.values[50] * b.values[50]);
        cov.add(b.values[25] * b.values[50]);
    }
    // Cov(B_s, B_t) = s (T - t) / T for s <= t.
    EXPECT_NEAR(var_q.mean(), 0.5 * 1.5 / 2.0, 4 * var_q.stderr_mean());
    EXPECT_NEAR(var_h.mean(), 1.0 * 1.0 / 2.0, 4 * var_h.stderr_mean());
    EXPECT_NEAR(cov.mean(), 0.5 * 1.0 / 2.0, 4 * cov.stderr_mean());
}

TEST(Bridge, RejectsBadArguments) {
    RngStream rng(1, 0);
    EXPECT_THROW(sample_bridge(1, 1.0, 1.0, rng), std::invalid_argument);
    EXPECT_THROW(sample_bridge(10, 0.0, 1.0, rng), std::invalid_argument);
}

TEST(Excursion, NonnegativeWithZeroEnds) {
    RngStream rng(2, 0);
    const auto e = sample_excursion(1000, 1.0, rng);
    EXPECT_EQ(e.kind, PathKind::excursion);
    EXPECT_EQ(e.values.front(), 0.0);
    EXPECT_EQ(e.values.back(), 0.0);
    for (double v : e.values) EXPECT_GE(v, 0.0);
}

TEST(Excursion, MeanMaximumAndScaling) {
    // E[max of a standard excursion] = sqrt(pi / 2); length L scales it by sqrt(L).
    constexpr std::size_t reps = 4000;
    stats::Accumulator m1, m4;
    for (std::size_t r = 0; r < reps; ++r) {
        auto a = derive_stream(3, "exc1", r);
        auto b = derive_stream(3, "exc4", r);
        m1.add(sample_excursion(2001, 1.0, a).sup());
        m4.add(sample_excursion(2001, 4.0, b).sup());
    }
    const double target = std::sqrt(std::numbers::pi / 2.0);
    // Grid maxima sit slightly below the continuum maximum.
    EXPECT_NEAR(m1.mean(), target, 4 * m1.stderr_mean() + 0.02);
    EXPECT_NEAR(m4.mean() / m1.mean(), 2.0, 0.05);
}

TEST(Snake, LabelCovarianceGivenLifetime) {
    RngStream base(4, 0);
    const auto x = sample_excursion(200, 1.0, base);
    constexpr std::size_t reps = 20000;
    const std::size_t i = 60, j = 140;
    stats::Accumulator vi, cij;
    for (std::size_t r = 0; r < reps; ++r) {
        auto rng = derive_stream(4, "labels", r);
        const auto s = sample_snake_labels(x, rng);
        vi.add(s.y_values[i] * s.y_values[i]);
        cij.add(s.y_values[i] * s.y_values[j]);
    }
    const double mij = *std::min_element(x.values.begin() + i, x.values.begin() + j + 1);
    EXPECT_NEAR(vi.mean(), x.values[i], 4 * vi.stderr_mean());
    EXPECT_NEAR(cij.mean(), mij, 4 * cij.stderr_mean());
}

TEST(Snake, MinimumLocated) {
    RngStream rng(5, 0);
    const auto s = sample_brownian_snake(512, rng);
    EXPECT_EQ(s.size(), 512u);
    EXPECT_EQ(s.y_values.front(), 0.0);
    EXPECT_EQ(s.y_min(), *std::min_element(s.y_values.begin(), s.y_values.end()));
    EXPECT_FALSE(s.degenerate);
}

TEST(Snake, RejectsNonExcursion) {
    RngStream rng(6, 0);
    const auto b = sample_bridge(10, 1.0, 1.0, rng);
    EXPECT_THROW(sample_snake_labels(b, rng), std::invalid_argument);
}

TEST(Stable, LaplaceTransform) {
    constexpr std::size_t reps = 200000;
    for (double alpha : {1.2, 1.5, 1.8}) {
        stats::Accumulator acc;
        RngStream rng(7, static_cast<std::uint64_t>(alpha * 10));
        for (std::size_t r = 0; r < reps; ++r) acc.add(std::exp(-0.7 * sample_stable_increment(alpha, 1.3, 0.5, rng)));
        const double target = std::exp(0.5 * 1.3 * std::pow(0.7, alpha));
        EXPECT_NEAR(acc.mean(), target, 5 * acc.stderr_mean()) << "alpha " << alpha;
    }
}

TEST(Stable, RejectsBadArguments) {
    RngStream rng(1, 0);
    EXPECT_THROW(sample_stable_increment(2.0, 1.0, 1.0, rng), std::invalid_argument);
    EXPECT_THROW(sample_stable_increment(1.5, -1.0, 1.0, rng), std::invalid_argument);
}
