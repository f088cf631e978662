#include <gtest/gtest.h>

#include <algorithm>

#include "bml/geodesic.hpp"
#include "bml/snake_map.hpp"
#include "bml/verify/oracles.hpp"

using namespace bml;
using namespace bml::verify;

namespace {

std::vector<std::vector<std::size_t>> sorted_paths(const GeodesicBundle& b) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& p : b.paths) out.push_back(p.vertices);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Geodesics, GridCornerToCornerCountsBinomial) {
    const auto g = grid_graph(4, 4);
    const auto b = enumerate_geodesics(g, 0, 15);
    EXPECT_EQ(b.length, 6.0);
    EXPECT_EQ(b.paths.size(), 20u);  // C(6, 3)
    EXPECT_EQ(b.total_count, 20u);
    EXPECT_EQ(sorted_paths(b), brute_force_geodesics(g, 0, 15, 0.0));
    for (const auto& p : b.paths) EXPECT_EQ(p.length(), 6.0);
}

TEST(Geodesics, CapTruncatesAndClassificationRefuses) {
    const auto g = grid_graph(6, 6);
    GeodesicOptions opt;
    opt.cap = 10;
    const auto b = enumerate_geodesics(g, 0, 35, opt);
    EXPECT_TRUE(b.truncated);
    EXPECT_EQ(b.paths.size(), 10u);
    EXPECT_EQ(b.total_count, 11u);
    EXPECT_FALSE(b.signature);
    EXPECT_THROW(classify_network(b), unclassifiable_error);
}

TEST(Geodesics, RejectsBadEndpoints) {
    const auto g = path_graph(4);
    EXPECT_THROW(enumerate_geodesics(g, 1, 1), std::invalid_argument);
    EXPECT_THROW(enumerate_geodesics(g, 0, 9), std::invalid_argument);
    const GraphSpace split(4, EdgeList{{0, 1}, {2, 3}});
    EXPECT_THROW(enumerate_geodesics(split, 0, 3), std::invalid_argument);
}

TEST(Geodesics, NormalNetworks) {
    for (std::size_t j = 1; j <= 4; ++j)
        for (std::size_t k = 1; k <= 4; ++k) {
            const auto f = normal_network(j, k);
            const auto b = enumerate_geodesics(f.space, f.u, f.v);
            EXPECT_EQ(b.paths.size(), j * k);
            EXPECT_EQ(*b.signature, (NetworkSignature{j, k, j - 1}));
        }
}

TEST(Geodesics, DenseMetricMatchesBruteForce) {
    for (std::uint64_t r = 0; r < 5; ++r) {
        auto rng = derive_stream(1, "dense", r);
        const auto map = quotient_metric(sample_brownian_snake(9, rng));
        const DenseMetricSpace space(map.dmat, map.n);
        for (std::size_t a = 0; a < map.n; ++a)
            for (std::size_t b = 0; b < map.n; ++b) {
                if (map.distance(a, b) == 0.0) continue;
                const auto bundle = enumerate_geodesics(space, a, b);
                EXPECT_NEAR(bundle.length, map.distance(a, b), 1e-12);
                EXPECT_EQ(sorted_paths(bundle), brute_force_geodesics(space, a, b, default_slack(space, bundle.length)));
            }
    }
}

TEST(Geodesics, CanonicalGeodesicTakesLowestIndex) {
    const auto g = grid_graph(3, 3);
    const auto dag = geodesic_dag(g, 8);
    const auto p = canonical_geodesic(dag, 0);
    EXPECT_EQ(p.vertices, (std::vector<std::size_t>{0, 1, 2, 5, 8}));
    EXPECT_EQ(p.length(), 4.0);
}

TEST(Hausdorff, AgreesWithDefinition) {
    RngStream rng(2, 0);
    const auto g = grid_graph(7, 5);
    std::vector<double> dmat(35 * 35);
    for (std::size_t u = 0; u < 35; ++u) {
        const auto d = g.distances_from(u);
        std::copy(d.begin(), d.end(), dmat.begin() + static_cast<std::ptrdiff_t>(u * 35));
    }
    for (int t = 0; t < 50; ++t) {
        std::vector<std::size_t> a, b;
        for (int i = 0; i < 4; ++i) {
            a.push_back(static_cast<std::size_t>(rng.uniform_index(35)));
            b.push_back(static_cast<std::size_t>(rng.uniform_index(35)));
        }
        EXPECT_EQ(hausdorff_distance(g, a, b), brute_force_hausdorff(dmat, 35, a, b));
    }
}

TEST(Coalescence, CommonSuffix) {
    GeodesicPath g1{{5, 4, 3, 2, 0}, {0, 1, 2, 3, 4}};
    GeodesicPath g2{{9, 8, 3, 2, 0}, {0, 1, 2, 3, 4}};
    const auto c = coalescence_point(0, g1, g2);
    EXPECT_EQ(c.vertex, 3u);
    EXPECT_EQ(c.distance, 2.0);
    GeodesicPath g3{{7, 1, 0}, {0, 1, 2}};
    EXPECT_EQ(coalescence_point(0, g1, g3).vertex, 0u);
    EXPECT_THROW(coalescence_point(2, g1, g2), std::invalid_argument);
}

TEST(Stars, MatchBruteForce) {
    const auto s = star_graph(5, 3);
    const auto rep = star_at(s, 0, 6, 3.0);
    EXPECT_EQ(rep.k, 5u);
    EXPECT_EQ(rep.witnesses.size(), 5u);
    EXPECT_EQ(star_at(s, 0, 3, 3.0).k, 3u);
    EXPECT_TRUE(star_at(s, 0, 3, 10.0).skipped);
    const auto g = grid_graph(5, 5);
    for (std::size_t z = 0; z < 25; ++z) {
        const auto r = star_at(g, z, 4, 2.0);
        if (!r.skipped) {
            EXPECT_EQ(r.k, brute_force_star(g, z, 4, 2.0)) << "center " << z;
        }
    }
    EXPECT_THROW(star_at(g, 0, 1, 2.0), std::invalid_argument);
    RngStream rng(3, 0);
    EXPECT_EQ(star_census(g, 4, 1.0, 7, rng).size(), 7u);
}

TEST(BoxCounting, CoveringIsValidAndGridIsTwoDimensional) {
    const auto g = grid_graph(60, 60);
    std::vector<std::size_t> all(g.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const std::vector<double> scales{2, 4, 8, 16, 32};
    const auto counts = covering_counts(g, all, scales);
    for (std::size_t s = 1; s < counts.size(); ++s) EXPECT_LE(counts[s], counts[s - 1]);
    const auto dim = box_counting_dimension(g, all, scales);
    EXPECT_NEAR(dim.slope, 2.0, 0.35);
    const auto line = path_graph(2000);
    std::vector<std::size_t> pts(2000);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = i;
    EXPECT_NEAR(box_counting_dimension(line, pts, scales).slope, 1.0, 0.1);
    EXPECT_THROW(box_counting_dimension(g, all, std::vector<double>{2, 4, 8}), std::invalid_argument);
}

TEST(Frame, CanonicalFrameOnGridIsOneDimensional) {
    const auto g = grid_graph(80, 80);
    RngStream rng(4, 0);
    const std::vector<double> scales{2, 4, 8, 16, 32};
    const auto frame = frame_box_dimension(g, 10, scales, rng);
    EXPECT_LT(frame.slope, 1.6);
    EXPECT_GT(frame.point_count, 0u);
}

TEST(Confluence, DeficitOfIdenticalAndDisjointPaths) {
    GeodesicPath a{{0, 1, 2, 3}, {0, 1, 2, 3}};
    EXPECT_EQ(overlap_deficit(a, a), 0.0);
    GeodesicPath b{{0, 5, 2, 3}, {0, 1, 2, 3}};
    EXPECT_EQ(overlap_deficit(a, b), 0.0);  // shared ends 0 and 2..3
    GeodesicPath c{{7, 1, 2, 3}, {0, 1, 2, 3}};
    EXPECT_EQ(overlap_deficit(a, c), 1.0);
}

TEST(Confluence, StatisticOnGrid) {
    const auto g = grid_graph(40, 40);
    RngStream rng(5, 0);
    ConfluenceOptions opt;
    opt.pairs = 100;
    const std::vector<double> eps{1, 2, 4};
    const auto t = strong_confluence_statistic(g, eps, rng, opt);
    EXPECT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.samples.size(), 100u);
    for (const auto& s : t.samples) {
        if (s.hausdorff == 0.0) {
            EXPECT_EQ(s.deficit, 0.0);
        }
    }
    EXPECT_GE(t.violation_mass, 0.0);
    opt.min_points = 5000;
    EXPECT_THROW(strong_confluence_statistic(g, eps, rng, opt), std::invalid_argument);
}
