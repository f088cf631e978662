#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "bml/core/rng.hpp"
#include "bml/core/stats.hpp"

using bml::RngStream;
using bml::detail::Philox4x32;

TEST(Philox, KnownAnswerVectors) {
    EXPECT_EQ(Philox4x32::apply({0, 0, 0, 0}, {0, 0}),
              (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, SameSeedSameSequence) {
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RngStream, StreamsDiffer) {
    auto a = bml::derive_stream(1, "x", 0);
    auto b = bml::derive_stream(1, "x", 1);
    auto c = bml::derive_stream(1, "y", 0);
    auto d = bml::derive_stream(2, "x", 0);
    const auto va = a();
    EXPECT_NE(va, b());
    EXPECT_NE(va, c());
    EXPECT_NE(va, d());
}

TEST(RngStream, SplitIsDeterministicAndDistinct) {
    RngStream r(3, 4);
    auto s1 = r.split(0), s2 = r.split(0), s3 = r.split(1);
    const auto x = s1();
    EXPECT_EQ(x, s2());
    EXPECT_NE(x, s3());
}

TEST(RngStream, UniformMoments) {
    RngStream r(11, 0);
    bml::stats::Accumulator acc;
    for (int i = 0; i < 200000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        acc.add(u);
    }
    EXPECT_NEAR(acc.mean(), 0.5, 0.005);
    EXPECT_NEAR(acc.variance(), 1.0 / 12.0, 0.002);
}

TEST(RngStream, UniformIndexIsUnbiased) {
    RngStream r(5, 0);
    std::vector<std::size_t> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[r.uniform_index(7)];
    EXPECT_LT(bml::stats::chi_square_uniform(counts), bml::stats::chi_square_quantile(6, 3.7));
}

TEST(RngStream, NormalAndExponentialMoments) {
    RngStream r(9, 0);
    bml::stats::Accumulator n, e;
    for (int i = 0; i < 200000; ++i) {
        n.add(r.normal());
        e.add(r.exponential());
    }
    EXPECT_NEAR(n.mean(), 0.0, 0.01);
    EXPECT_NEAR(n.variance(), 1.0, 0.015);
    EXPECT_NEAR(e.mean(), 1.0, 0.01);
    EXPECT_NEAR(e.variance(), 1.0, 0.03);
}
