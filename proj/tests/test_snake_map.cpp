#include <gtest/gtest.h>

#include <sstream>

#include "bml/snake_map.hpp"
#include "bml/verify/oracles.hpp"

using namespace bml;

namespace {

BrownianSnakeSample fixed_snake(std::vector<double> x, std::vector<double> y) {
    BrownianSnakeSample s;
    s.x_path.kind = PathKind::excursion;
    s.x_path.times = uniform_grid(x.size(), 1.0);
    s.x_path.values = std::move(x);
    s.y_values = std::move(y);
    detail::locate_label_minimum(s);
    return s;
}

}  // namespace

TEST(DCirc, HandExample) {
    const auto s = fixed_snake({0, 1, 2, 1, 0}, {0, -1, 0.5, -2, 0});
    // d(1, 2): inner min over [1,2] = -1, outer min over {0,1} u {2,3,4} = -2.
    EXPECT_DOUBLE_EQ(d_circ(s, 1, 2), -1 + 0.5 - 2 * -1);
    EXPECT_DOUBLE_EQ(d_circ(s, 2, 1), d_circ(s, 1, 2));
    EXPECT_DOUBLE_EQ(d_circ(s, 0, 4), 0.0);
    EXPECT_DOUBLE_EQ(d_circ(s, 3, 3), 0.0);
    EXPECT_THROW(d_circ(s, 0, 5), std::invalid_argument);
}

TEST(DCirc, MatrixAgreesWithPointwise) {
    RngStream rng(1, 0);
    const auto s = sample_brownian_snake(64, rng);
    const auto m = d_circ_matrix(s);
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t j = 0; j < 64; ++j) EXPECT_NEAR(m[i * 64 + j], d_circ(s, i, j), 1e-12);
}

TEST(Quotient, MatchesChainOracle) {
    for (std::uint64_t r = 0; r < 20; ++r) {
        auto rng = derive_stream(2, "chain", r);
        const auto s = sample_brownian_snake(7, rng);
        const auto q = quotient_metric(s);
        const auto bf = verify::brute_force_chain_metric(s);
        for (std::size_t k = 0; k < bf.size(); ++k) EXPECT_NEAR(q.dmat[k], bf[k], 1e-12);
    }
}

TEST(Quotient, FloydAndDijkstraAgree) {
    RngStream rng(3, 0);
    const auto s = sample_brownian_snake(200, rng);
    QuotientOptions a, b;
    b.floyd_limit = 10;
    b.threads = 2;
    const auto qa = quotient_metric(s, a), qb = quotient_metric(s, b);
    for (std::size_t k = 0; k < qa.dmat.size(); ++k) EXPECT_NEAR(qa.dmat[k], qb.dmat[k], 1e-12);
}

TEST(Quotient, RootDistancesAndIdentifications) {
    RngStream rng(4, 0);
    const auto s = sample_brownian_snake(300, rng);
    const auto q = quotient_metric(s);
    const auto d = distances_to_root(s);
    for (std::size_t i = 0; i < q.n; ++i) EXPECT_NEAR(q.distance(q.root_index, i), d[i], 1e-12);
    // The two ends of the excursion are the same point.
    EXPECT_EQ(q.distance(0, q.n - 1), 0.0);
    EXPECT_EQ(q.identified[q.n - 1], 0u);
}

TEST(Quotient, ResourceLimit) {
    RngStream rng(5, 0);
    const auto s = sample_brownian_snake(100, rng);
    QuotientOptions opt;
    opt.max_points = 50;
    EXPECT_THROW(quotient_metric(s, opt), resource_limit_error);
}

TEST(MarkedPoints, UniformIndices) {
    RngStream rng(6, 0);
    const auto q = quotient_metric(sample_brownian_snake(10, rng));
    std::vector<std::size_t> counts(10, 0);
    for (int i = 0; i < 20000; ++i) ++counts[resample_marked_points(q, rng).first];
    EXPECT_LT(stats::chi_square_uniform(counts), stats::chi_square_quantile(9, 3.7));
}

TEST(Dmat, BinaryRoundTripAndTruncation) {
    RngStream rng(7, 0);
    const auto q = quotient_metric(sample_brownian_snake(40, rng));
    std::stringstream ss;
    write_dmat_binary(ss, q, 99);
    const std::string bytes = ss.str();
    EXPECT_EQ(bytes.substr(0, 8), "BMLDMAT1");
    std::istringstream in(bytes);
    const auto f = read_dmat_binary(in);
    EXPECT_EQ(f.n, 40u);
    EXPECT_EQ(f.header.at("seed"), 99);
    EXPECT_EQ(f.dmat, q.dmat);
    std::istringstream cut(bytes.substr(0, bytes.size() - 8));
    EXPECT_THROW(read_dmat_binary(cut), std::invalid_argument);
    std::istringstream junk("NOTADMAT........");
    EXPECT_THROW(read_dmat_binary(junk), std::invalid_argument);
}

TEST(Dmat, CsvHasOneRowPerPoint) {
    RngStream rng(8, 0);
    const auto q = quotient_metric(sample_brownian_snake(16, rng));
    std::ostringstream os;
    write_map_csv(os, q);
    const auto text = os.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 17);
    EXPECT_EQ(text.rfind("index,time,X,Y,dist_to_root\n", 0), 0u);
}
