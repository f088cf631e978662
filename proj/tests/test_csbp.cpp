#include <gtest/gtest.h>

#include <cmath>

#include "bml/core/stats.hpp"
#include "bml/csbp.hpp"

using namespace bml;

TEST(Ut, SolvesBackwardEquation) {
    for (double alpha : {1.2, 1.5, 1.8})
        for (double lambda : {0.3, 1.0, 4.0}) {
            const double t = 0.7, h = 1e-6, c = 1.3;
            const double du = (u_t(alpha, c, lambda, t + h) - u_t(alpha, c, lambda, t - h)) / (2 * h);
            EXPECT_NEAR(du, -branching_mechanism(alpha, c, u_t(alpha, c, lambda, t)), 1e-6);
        }
}

TEST(Ut, SemigroupAndBoundaryValues) {
    const double alpha = 1.5, c = 1.0;
    EXPECT_DOUBLE_EQ(u_t(alpha, c, 2.0, 0.0), 2.0);
    EXPECT_EQ(u_t(alpha, c, 0.0, 1.0), 0.0);
    EXPECT_NEAR(u_t(alpha, c, 1.0, 1.0), 0.25, 1e-15);
    EXPECT_NEAR(u_t(alpha, c, 0.8, 0.9), u_t(alpha, c, u_t(alpha, c, 0.8, 0.4), 0.5), 1e-13);
    // lambda -> infinity gives the extinction exponent.
    EXPECT_NEAR(u_t(alpha, c, 1e12, 1.0), u_t(alpha, c, INFINITY, 1.0), 1e-5);
    EXPECT_THROW(u_t(alpha, c, -1.0, 1.0), std::invalid_argument);
}

TEST(Extinction, ClosedForm) {
    EXPECT_NEAR(extinction_prob(1.5, 1.0, 1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(extinction_prob(1.5, 1.0, 2.0, 4.0), 1.0 - std::exp(-2.0 / 16.0), 1e-15);
    EXPECT_EQ(extinction_prob(1.5, 1.0, 0.0, 1.0), 0.0);
    EXPECT_THROW(extinction_prob(1.5, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Lifetime, CdfIsNormalizedAndMonotone) {
    const LifetimeWindow w{0.5, 3.0};
    EXPECT_DOUBLE_EQ(csbp_excursion_lifetime_cdf(1.5, 0.5, w), 0.0);
    EXPECT_DOUBLE_EQ(csbp_excursion_lifetime_cdf(1.5, 3.0, w), 1.0);
    double prev = 0.0;
    for (double t = 0.6; t < 3.0; t += 0.1) {
        const double f = csbp_excursion_lifetime_cdf(1.5, t, w);
        EXPECT_GT(f, prev);
        prev = f;
    }
    EXPECT_THROW(csbp_excursion_lifetime_cdf(1.5, 4.0, w), std::invalid_argument);
}

TEST(Lamperti, ExactInverseOnSyntheticPath) {
    LevyPath lp;
    lp.alpha = 1.5;
    lp.path.times = {0.0, 0.1, 0.25, 0.3, 0.5};
    lp.path.values = {1.0, 1.4, 0.6, 0.6, -0.2};
    lp.absorbed = true;
    const auto cp = lamperti_levy_to_csbp(lp);
    ASSERT_TRUE(cp.extinction_index);
    EXPECT_EQ(cp.path.values.back(), 0.0);
    const auto back = lamperti_csbp_to_levy(cp);
    ASSERT_EQ(back.path.size(), lp.path.size());
    for (std::size_t k = 0; k + 1 < lp.path.size(); ++k) {
        EXPECT_NEAR(back.path.times[k], lp.path.times[k], 1e-14);
        EXPECT_EQ(back.path.values[k], lp.path.values[k]);
    }
    // The absorbed step ends at the interpolated crossing.
    EXPECT_NEAR(back.path.times.back(), 0.3 + 0.2 * 0.6 / 0.8, 1e-14);
    EXPECT_TRUE(back.absorbed);
}

TEST(Lamperti, ClockOfConstantPath) {
    // X = 2 over Levy time 1 runs the CSBP clock for 1/2.
    LevyPath lp;
    lp.path.times = {0.0, 1.0};
    lp.path.values = {2.0, 2.0};
    const auto cp = lamperti_levy_to_csbp(lp);
    EXPECT_NEAR(cp.path.times.back(), 0.5, 1e-15);
}

TEST(Lamperti, RejectsNonpositiveLivePath) {
    LevyPath lp;
    lp.path.times = {0.0, 1.0, 2.0};
    lp.path.values = {1.0, -1.0, 1.0};
    EXPECT_THROW(lamperti_levy_to_csbp(lp), std::invalid_argument);
}

TEST(SampleCsbp, SmallMonteCarloMatchesLaplace) {
    constexpr std::size_t reps = 4000;
    stats::Accumulator acc, surv;
    for (std::size_t r = 0; r < reps; ++r) {
        auto rng = derive_stream(1, "csbp.test", r);
        const auto p = sample_csbp(1.5, 1.0, 1.0, 0.5, 2e-3, rng);
        const double y = p.value_at(0.5);
        ASSERT_GE(y, 0.0);
        acc.add(std::exp(-y));
        surv.add(y > 0 ? 1.0 : 0.0);
    }
    EXPECT_NEAR(acc.mean(), csbp_laplace(1.5, 1.0, 1.0, 1.0, 0.5), 4 * acc.stderr_mean() + 0.01);
    EXPECT_NEAR(surv.mean(), extinction_prob(1.5, 1.0, 1.0, 0.5), 4 * surv.stderr_mean() + 0.01);
}

TEST(SampleCsbp, ZeroStartStaysAtZero) {
    RngStream rng(1, 0);
    const auto p = sample_csbp(1.5, 1.0, 0.0, 1.0, 1e-3, rng);
    EXPECT_EQ(p.value_at(0.7), 0.0);
    ASSERT_TRUE(p.extinction_time());
    EXPECT_EQ(*p.extinction_time(), 0.0);
}

TEST(SampleCsbp, Deterministic) {
    auto a = derive_stream(5, "d", 0), b = derive_stream(5, "d", 0);
    EXPECT_EQ(sample_csbp(1.5, 1.0, 1.0, 1.0, 1e-3, a).path.values, sample_csbp(1.5, 1.0, 1.0, 1.0, 1e-3, b).path.values);
}

TEST(MergePpp, DepthIsSymmetricRangeMaximum) {
    MergePPP ppp({{0.1, 0.3}, {0.4, 0.9}, {0.7, 0.5}, {0.8, 0.2}}, 0.1);
    EXPECT_EQ(merge_depth(ppp, 0.0, 0.2), 0.3);
    EXPECT_EQ(merge_depth(ppp, 0.2, 0.0), 0.3);
    EXPECT_EQ(merge_depth(ppp, 0.5, 0.9), 0.5);
    EXPECT_EQ(merge_depth(ppp, 0.0, 1.0), 0.9);
    EXPECT_TRUE(ppp.query(0.2, 0.3).below_truncation);
    EXPECT_THROW(merge_depth(ppp, 0.5, 0.5), std::invalid_argument);
    EXPECT_EQ(ppp.count_above(0.3), 3u);
    EXPECT_EQ(ppp.count_above(0.3, 0.5), 2u);
}

TEST(MergePpp, RangeMaximumMatchesScan) {
    RngStream rng(3, 0);
    const auto ppp = sample_merge_ppp(0.05, rng);
    for (int q = 0; q < 500; ++q) {
        const double a = rng.uniform(), b = rng.uniform();
        if (a == b) continue;
        double best = 0.0;
        for (const auto& p : ppp.points())
            if (p.s > std::min(a, b) && p.s < std::max(a, b)) best = std::max(best, p.x);
        EXPECT_EQ(merge_depth(ppp, a, b), best);
    }
}

TEST(MergePpp, MeanCount) {
    stats::Accumulator acc;
    for (std::uint64_t r = 0; r < 2000; ++r) {
        auto rng = derive_stream(2, "ppp", r);
        acc.add(static_cast<double>(sample_merge_ppp(0.05, rng).size()));
    }
    EXPECT_NEAR(acc.mean(), 0.5 / 0.0025, 4 * acc.stderr_mean());
}
