#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "bml/core/stats.hpp"
#include "bml/planar_map.hpp"
#include "bml/verify/oracles.hpp"

using namespace bml;

TEST(LabeledTree, UniformOverShapesAndLabels) {
    // n = 3: 5 shapes x 27 label assignments, all equally likely.
    const auto all = verify::enumerate_labeled_trees(3);
    ASSERT_EQ(all.size(), 135u);
    std::map<std::pair<std::vector<std::int8_t>, std::vector<std::int32_t>>, std::size_t> index;
    for (std::size_t i = 0; i < all.size(); ++i) index[{all[i].contour, all[i].labels}] = i;
    std::vector<std::size_t> counts(all.size(), 0);
    RngStream rng(1, 0);
    for (int r = 0; r < 135 * 200; ++r) {
        const auto t = sample_labeled_tree(3, rng);
        const auto it = index.find({t.contour, t.labels});
        ASSERT_NE(it, index.end());
        ++counts[it->second];
    }
    EXPECT_LT(stats::chi_square_uniform(counts), stats::chi_square_quantile(134, 3.7));
}

TEST(LabeledTree, ValidateRejectsBadTrees) {
    LabeledPlaneTree t;
    t.n_edges = 1;
    t.contour = {1, -1};
    t.labels = {0, 2};
    EXPECT_THROW(validate(t), std::invalid_argument);
    t.labels = {0, 1};
    t.contour = {-1, 1};
    EXPECT_THROW(validate(t), std::invalid_argument);
}

TEST(Cvs, SingleEdgeFixture) {
    LabeledPlaneTree t;
    t.n_edges = 1;
    t.contour = {1, -1};
    t.labels = {0, 1};
    const auto q = cvs_construct(t, 1);
    validate(q);
    EXPECT_EQ(q.n_vertices, 3u);
    EXPECT_EQ(q.n_edges(), 2u);
    EXPECT_EQ(q.pointed_vertex, 2);
    const auto d = bfs_metric(q, 2);
    EXPECT_EQ(d, (std::vector<std::int32_t>{1, 2, 0}));
    EXPECT_EQ(q.vertex[static_cast<std::size_t>(q.root_half_edge)], 0);
    const auto qm = cvs_construct(t, -1);
    EXPECT_EQ(qm.vertex[static_cast<std::size_t>(qm.opposite[static_cast<std::size_t>(qm.root_half_edge)])], 0);
}

TEST(Cvs, EnumerationCountsForSmallSizes) {
    for (std::size_t n = 1; n <= 3; ++n) {
        const auto e = verify::enumerate_cvs(n);
        EXPECT_TRUE(e.all_valid);
        EXPECT_TRUE(e.distance_identity);
        EXPECT_EQ(e.distinct_pointed, e.inputs);
        EXPECT_EQ(e.distinct_rooted, verify::rooted_quadrangulation_count(n));
        EXPECT_TRUE(e.uniform_multiplicity);
    }
    EXPECT_EQ(verify::rooted_quadrangulation_count(4), 378u);
}

TEST(Cvs, LargeSampleIsValid) {
    RngStream rng(2, 0);
    const auto t = sample_labeled_tree(5000, rng);
    const auto q = cvs_construct(t, 1);
    EXPECT_NO_THROW(validate(q));
    const auto d = bfs_metric(q, static_cast<std::size_t>(q.pointed_vertex));
    const auto lmin = *std::min_element(t.labels.begin(), t.labels.end());
    for (std::size_t v = 0; v <= 5000; ++v) ASSERT_EQ(d[v], t.labels[v] - lmin + 1);
}

TEST(FilledBall, NestedHullsAndBoundary) {
    RngStream rng(3, 0);
    const auto q = sample_quadrangulation(3000, rng);
    const auto center = static_cast<std::size_t>(q.pointed_vertex);
    const auto dist = bfs_metric(q, center);
    const auto base = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    std::vector<std::int32_t> prev;
    for (std::int32_t r = 1; r < dist[base]; ++r) {
        const auto fb = filled_ball(q, center, base, r, dist);
        EXPECT_GT(fb.boundary_length, 0u);
        EXPECT_FALSE(std::binary_search(fb.vertex_set.begin(), fb.vertex_set.end(), static_cast<std::int32_t>(base)));
        for (std::size_t v = 0; v < q.n_vertices; ++v) {
            if (dist[v] <= r) {
                EXPECT_TRUE(std::binary_search(fb.vertex_set.begin(), fb.vertex_set.end(), static_cast<std::int32_t>(v)));
            }
        }
        EXPECT_TRUE(std::includes(fb.vertex_set.begin(), fb.vertex_set.end(), prev.begin(), prev.end()));
        prev = fb.vertex_set;
    }
    EXPECT_EQ(boundary_length_process(q, center, base).size(), static_cast<std::size_t>(dist[base] - 1));
    EXPECT_THROW(filled_ball(q, center, base, dist[base]), std::invalid_argument);
    EXPECT_THROW(filled_ball(q, center, base, 0), std::invalid_argument);
}

TEST(Scaling, DistancesGrowLikeQuarterPower) {
    // Per-map mean distance to the pointed vertex, averaged over maps.
    auto mean_distance = [](std::size_t n) {
        stats::Accumulator acc;
        for (std::uint64_t r = 0; r < 100; ++r) {
            auto rng = derive_stream(4, "scale." + std::to_string(n), r);
            const auto d = quad_root_distances(sample_quadrangulation(n, rng));
            acc.add(std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size()));
        }
        return acc;
    };
    const auto a1 = mean_distance(10000), a2 = mean_distance(20000), a4 = mean_distance(40000);
    auto ratio_se = [&](const stats::Accumulator& a) {
        return a.mean() / a1.mean() * std::hypot(a.stderr_mean() / a.mean(), a1.stderr_mean() / a1.mean());
    };
    // kappa(n) n^{1/4} stable across sizes: ratios near 2^{1/4} and 4^{1/4}.
    EXPECT_NEAR(a2.mean() / a1.mean(), std::pow(2.0, 0.25), 4 * ratio_se(a2) + 0.02);
    EXPECT_NEAR(a4.mean() / a1.mean(), std::pow(4.0, 0.25), 4 * ratio_se(a4) + 0.02);
}

TEST(Calibration, MatchesMeans) {
    const std::vector<double> a{1, 2, 3}, b{4, 4, 4};
    EXPECT_DOUBLE_EQ(calibrate_scaling(a, b), 2.0);
    EXPECT_THROW(calibrate_scaling(std::vector<double>{}, b), std::invalid_argument);
}

TEST(Json, RoundTrip) {
    RngStream rng(5, 0);
    const auto q = sample_quadrangulation(200, rng);
    const auto j = to_json(q, 5);
    const auto back = quadrangulation_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.next, q.next);
    EXPECT_EQ(back.opposite, q.opposite);
    EXPECT_EQ(back.vertex, q.vertex);
    EXPECT_EQ(back.pointed_vertex, q.pointed_vertex);
    EXPECT_EQ(bfs_metric(back, 0), bfs_metric(q, 0));
    auto bad = j;
    bad["next"][0] = bad["next"][1];
    EXPECT_THROW(quadrangulation_from_json(bad), std::invalid_argument);
}
