#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <functional>
#include <sstream>

#include "bml/core/stats.hpp"
#include "bml/gff.hpp"
#include "bml/verify/oracles.hpp"

using namespace bml;

TEST(Dgff, GreenFunctionOracleAgreesWithEigen) {
    const std::size_t n = 7, m = n - 2;
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m * m, m * m);
    for (std::size_t y = 0; y < m; ++y)
        for (std::size_t x = 0; x < m; ++x) {
            const auto i = y * m + x;
            lap(i, i) = 4.0;
            if (x + 1 < m) lap(i, i + 1) = lap(i + 1, i) = -1.0;
            if (y + 1 < m) lap(i, i + m) = lap(i + m, i) = -1.0;
        }
    const Eigen::MatrixXd green = lap.inverse();
    const auto oracle = verify::dirichlet_green_function(n);
    for (std::size_t i = 0; i < m * m; ++i)
        for (std::size_t j = 0; j < m * m; ++j) EXPECT_NEAR(oracle[i * m * m + j], green(i, j), 1e-12);
}

TEST(Dgff, CovarianceMatchesGreenFunction) {
    const std::size_t n = 6, m = n - 2;
    const auto green = verify::dirichlet_green_function(n);
    constexpr std::size_t reps = 20000;
    std::vector<stats::Accumulator> acc(m * m);
    for (std::size_t r = 0; r < reps; ++r) {
        auto rng = derive_stream(1, "dgff", r);
        const auto f = sample_dgff(n, rng);
        for (std::size_t v = 0; v < n * n; ++v) {
            if (f.on_frame(v)) {
                ASSERT_EQ(f.values[v], 0.0);
            }
        }
        // Row of covariances with interior vertex (1, 1).
        for (std::size_t y = 0; y < m; ++y)
            for (std::size_t x = 0; x < m; ++x) acc[y * m + x].add(f.at(1, 1) * f.at(x + 1, y + 1));
    }
    for (std::size_t k = 0; k < m * m; ++k) EXPECT_NEAR(acc[k].mean(), green[k], 4.5 * acc[k].stderr_mean()) << k;
}

TEST(Dgff, RejectsTinyBox) {
    RngStream rng(1, 0);
    EXPECT_THROW(sample_dgff(2, rng), std::invalid_argument);
}

TEST(PathLength, Fixtures) {
    GffField f;
    f.n = 4;
    f.values.assign(16, 0.0);
    const std::vector<std::size_t> p{0, 1, 5, 6};
    EXPECT_EQ(path_length(f, kGffGamma, p), 4.0);
    f.values[5] = 2.0;
    EXPECT_NEAR(path_length(f, 0.5, p), 3.0 + std::exp(1.0), 1e-15);
    const std::vector<std::size_t> jump{0, 2};
    EXPECT_THROW(path_length(f, 0.5, jump), std::invalid_argument);
}

TEST(GffGeodesics, TwoByTwoBoxHasTwoGeodesics) {
    GffField f;
    f.n = 3;
    f.values.assign(9, 0.0);
    // Opposite corners of the unit square at (0,0)-(1,1): two geodesics.
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 4}};
    const auto b = gff_geodesic_bundle(f, kGffGamma, pairs);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].paths.size(), 2u);
    const GffSpace space(f, kGffGamma);
    for (const auto& p : b[0].paths) EXPECT_NEAR(space.vertex_length(p), 3.0, 1e-12);
}

TEST(GffGeodesics, MatchBruteForceOnSmallBox) {
    // Every simple path between two frame vertices of a 4x4 box, by DFS.
    const std::size_t n = 4;
    for (std::uint64_t r = 0; r < 5; ++r) {
        auto rng = derive_stream(2, "gffbf", r);
        const auto f = sample_dgff(n, rng);
        const auto pairs = boundary_pairs(n, 3, rng);
        const auto bundles = gff_geodesic_bundle(f, 1.0, pairs);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto [a, b] = pairs[k];
            double best = INFINITY;
            std::vector<std::vector<std::size_t>> argbest;
            std::vector<std::size_t> cur{a};
            std::vector<char> on(n * n, 0);
            on[a] = 1;
            std::function<void(std::size_t)> rec = [&](std::size_t u) {
                if (u == b) {
                    const double len = path_length(f, 1.0, cur);
                    if (len < best - 1e-12) {
                        best = len;
                        argbest = {cur};
                    } else if (len <= best + 1e-12) {
                        argbest.push_back(cur);
                    }
                    return;
                }
                for (std::size_t v = 0; v < n * n; ++v)
                    if (!on[v] && grid_adjacent(n, u, v)) {
                        on[v] = 1;
                        cur.push_back(v);
                        rec(v);
                        cur.pop_back();
                        on[v] = 0;
                    }
            };
            rec(a);
            const GffSpace space(f, 1.0);
            ASSERT_FALSE(bundles[k].paths.empty());
            EXPECT_NEAR(space.vertex_length(bundles[k].paths.front()), best, 1e-9);
            EXPECT_EQ(bundles[k].paths.size(), argbest.size());
        }
    }
}

TEST(GffGeodesics, FrameFractionAndOverlay) {
    RngStream rng(3, 0);
    const auto f = sample_dgff(32, rng);
    const auto pairs = boundary_pairs(32, 5, rng);
    const auto bundles = gff_geodesic_bundle(f, kGffGamma, pairs, {}, 2);
    const double frac = frame_vertex_fraction(f.values.size(), bundles);
    EXPECT_GT(frac, 0.0);
    EXPECT_LT(frac, 1.0);
    const auto mult = geodesic_multiplicity(f.values.size(), bundles);
    std::ostringstream csv, svg;
    write_overlay_csv(csv, 32, mult);
    write_overlay_svg(svg, f, mult);
    const auto text = csv.str();
    const auto hit = static_cast<std::ptrdiff_t>(std::count_if(mult.begin(), mult.end(), [](std::size_t m) { return m > 0; }));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), hit + 1);
    EXPECT_NE(svg.str().find("<svg"), std::string::npos);
}
