#pragma once

// The primary acceptance suite. Each check returns its measured values and a
// verdict; the gtest binary and the `acceptance` subcommand both call these.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bml/core/parallel.hpp"
#include "bml/core/rng.hpp"
#include "bml/core/stats.hpp"
#include "bml/csbp.hpp"
#include "bml/geodesic.hpp"
#include "bml/gff.hpp"
#include "bml/io/experiments.hpp"
#include "bml/planar_map.hpp"
#include "bml/snake_map.hpp"
#include "bml/stochastic.hpp"
#include "bml/verify/oracles.hpp"

namespace bml::verify {

/// Suite seed used when none is given on the command line.
inline constexpr std::uint64_t kSuiteSeed = 1;

struct AcceptanceConfig {
    std::uint64_t seed = kSuiteSeed;
    unsigned threads = 1;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    nlohmann::json metrics = nlohmann::json::object();
};

inline nlohmann::json to_json(const CheckResult& r) {
    return {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"metrics", r.metrics}};
}

namespace detail {

inline RngStream stream(const AcceptanceConfig& cfg, const std::string& name, std::uint64_t replica = 0) {
    return derive_stream(cfg.seed, "acceptance." + name, replica);
}

// CSBP marginals shared by checks 1 and 2: Y at t = 0.25 and t = 1 from y0 = 1.
struct CsbpMarginals {
    std::vector<double> quarter;
    std::vector<double> one;
};

inline constexpr double kCsbpDt = 1e-3;
inline constexpr std::size_t kCsbpReps = 100000;

inline std::shared_ptr<const CsbpMarginals> csbp_marginals(const AcceptanceConfig& cfg) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const CsbpMarginals>> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(cfg.seed); it != cache.end()) return it->second;
    auto m = std::make_shared<CsbpMarginals>();
    m->quarter.resize(kCsbpReps);
    m->one.resize(kCsbpReps);
    parallel_for(kCsbpReps, cfg.threads, [&](std::size_t i) {
        auto rng = stream(cfg, "csbp", i);
        const auto p = sample_csbp(1.5, 1.0, 1.0, 1.0, kCsbpDt, rng);
        m->quarter[i] = p.value_at(0.25);
        m->one[i] = p.value_at(1.0);
    });
    cache[cfg.seed] = m;
    return m;
}

// Linear interpolation of a grid path (clamped to the end values).
inline double interpolate(const GridPath& p, double t) {
    const auto& ts = p.times;
    if (t <= ts.front()) return p.values.front();
    if (t >= ts.back()) return p.values.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    const auto lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return p.values[lo] + w * (p.values[hi] - p.values[lo]);
}

inline double max_entry(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace detail

// -----------------------------------------------------------------------------
// 1-4: CSBP
// -----------------------------------------------------------------------------

inline CheckResult check_csbp_laplace(const AcceptanceConfig& cfg) {
    CheckResult r{1, "csbp_laplace_law"};
    const auto m = detail::csbp_marginals(cfg);
    r.passed = true;
    nlohmann::json rows = nlohmann::json::array();
    for (double t : {0.25, 1.0})
        for (double lambda : {0.5, 1.0, 2.0}) {
            const auto& ys = t == 1.0 ? m->one : m->quarter;
            stats::Accumulator acc;
            for (double y : ys) acc.add(std::exp(-lambda * y));
            const double target = std::exp(-u_t(1.5, 1.0, lambda, t));
            const double tol = 3.0 * acc.stderr_mean() + 0.01;
            const bool ok = std::abs(acc.mean() - target) < tol;
            r.passed = r.passed && ok;
            rows.push_back({{"t", t}, {"lambda", lambda}, {"estimate", acc.mean()}, {"se", acc.stderr_mean()},
                            {"target", target}, {"tolerance", tol}, {"passed", ok}});
        }
    r.metrics = {{"reps", detail::kCsbpReps}, {"dt", detail::kCsbpDt}, {"rows", rows}};
    return r;
}

inline CheckResult check_csbp_extinction(const AcceptanceConfig& cfg) {
    CheckResult r{2, "csbp_extinction_law"};
    const auto m = detail::csbp_marginals(cfg);
    stats::Accumulator surv;
    for (double y : m->one) surv.add(y > 0.0 ? 1.0 : 0.0);
    const double target = extinction_prob(1.5, 1.0, 1.0, 1.0);
    r.passed = std::abs(surv.mean() - target) <= 0.01;
    r.metrics = {{"survival", surv.mean()}, {"se", surv.stderr_mean()}, {"target", target}, {"tolerance", 0.01}};
    return r;
}

inline CheckResult check_csbp_scaling(const AcceptanceConfig& cfg) {
    CheckResult r{3, "csbp_scaling"};
    constexpr std::size_t reps = 100000;
    constexpr double scale = 4.0, t = 0.5;
    const double t_big = std::sqrt(scale) * t;  // C^{alpha-1} t with alpha = 3/2
    std::vector<double> big(reps), small(reps);
    parallel_for(reps, cfg.threads, [&](std::size_t i) {
        auto rb = detail::stream(cfg, "scaling.big", i);
        big[i] = sample_csbp(1.5, 1.0, scale, t_big, detail::kCsbpDt, rb).value_at(t_big) / scale;
        auto rs = detail::stream(cfg, "scaling.small", i);
        small[i] = sample_csbp(1.5, 1.0, 1.0, t, detail::kCsbpDt, rs).value_at(t);
    });
    const double ks = stats::ks_two_sample(big, small);
    r.passed = ks < 0.02;
    r.metrics = {{"reps", reps}, {"C", scale}, {"t", t}, {"ks", ks}, {"threshold", 0.02}};
    return r;
}

inline CheckResult check_lamperti_round_trip(const AcceptanceConfig& cfg) {
    CheckResult r{4, "lamperti_round_trip"};
    constexpr std::size_t reps = 1000;
    const double dt = detail::kCsbpDt;
    std::vector<double> ratio(reps);
    parallel_for(reps, cfg.threads, [&](std::size_t i) {
        auto rng = detail::stream(cfg, "lamperti", i);
        LevySimulationOptions opt;
        opt.dt = dt;
        const auto lp = sample_levy_to_absorption({1.5, 1.0}, 1.0, 1.0, opt, rng);
        const auto cp = lamperti_levy_to_csbp(lp);
        const auto back = lamperti_csbp_to_levy(cp);
        double sup = 0.0, dev = 0.0;
        for (std::size_t k = 0; k < lp.path.size(); ++k) {
            const double x = std::max(lp.path.values[k], 0.0);
            sup = std::max(sup, x);
            dev = std::max(dev, std::abs(detail::interpolate(back.path, lp.path.times[k]) - x));
        }
        ratio[i] = dev / (10.0 * std::sqrt(dt) * sup);
    });
    const auto within = static_cast<std::size_t>(std::count_if(ratio.begin(), ratio.end(), [](double q) { return q < 1.0; }));
    const double frac = static_cast<double>(within) / static_cast<double>(reps);
    r.passed = frac >= 0.99;
    r.metrics = {{"paths", reps}, {"fraction_within_bound", frac}, {"worst_ratio", detail::max_entry(ratio)}};
    return r;
}

// -----------------------------------------------------------------------------
// 5: snake-map invariants
// -----------------------------------------------------------------------------

inline CheckResult check_snake_invariants(const AcceptanceConfig& cfg) {
    CheckResult r{5, "snake_map_invariants"};
    constexpr std::size_t n = 512;
    auto rng = detail::stream(cfg, "snake");
    const auto snake = sample_brownian_snake(n, rng);
    QuotientOptions qo;
    qo.threads = cfg.threads;
    const auto map = quotient_metric(snake, qo);
    const auto dc = d_circ_matrix(snake);
    const double scale = std::max(detail::max_entry(map.dmat), 1e-300);
    const double tol = 1e-9 * scale;
    double tri = 0.0, dom = 0.0, cactus = 0.0, root = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double dij = map.distance(i, j);
            dom = std::max(dom, dij - dc[i * n + j]);
            cactus = std::max(cactus, std::abs(snake.y_values[i] - snake.y_values[j]) - dij);
            for (std::size_t k = 0; k < n; ++k) tri = std::max(tri, dij - map.distance(i, k) - map.distance(k, j));
        }
    for (std::size_t i = 0; i < n; ++i)
        root = std::max(root, std::abs(map.distance(map.root_index, i) - (snake.y_values[i] - snake.y_min())));
    // Chain oracle at n = 6 on several samples.
    double chain = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto rs = detail::stream(cfg, "snake.chain", s);
        const auto small = sample_brownian_snake(6, rs);
        const auto q = quotient_metric(small);
        const auto bf = brute_force_chain_metric(small);
        for (std::size_t k = 0; k < bf.size(); ++k) chain = std::max(chain, std::abs(q.dmat[k] - bf[k]));
    }
    const bool chain_ok = chain <= 1e-12;
    r.passed = tri <= tol && dom <= tol && cactus <= tol && root <= tol && chain_ok;
    r.metrics = {{"n", n}, {"triangle_excess", tri}, {"dcirc_excess", dom}, {"cactus_excess", cactus},
                 {"root_formula_error", root}, {"tolerance", tol}, {"chain_oracle_error", chain}};
    return r;
}

// -----------------------------------------------------------------------------
// 6-8: quadrangulations
// -----------------------------------------------------------------------------

inline CheckResult check_cvs(const AcceptanceConfig& cfg) {
    CheckResult r{6, "cvs_correctness"};
    r.passed = true;
    nlohmann::json enumerations = nlohmann::json::array();
    for (std::size_t n = 1; n <= 3; ++n) {
        const auto e = enumerate_cvs(n);
        const auto rooted = rooted_quadrangulation_count(n);
        const bool ok = e.all_valid && e.distance_identity && e.distinct_pointed == e.inputs &&
                        e.distinct_rooted == rooted && e.uniform_multiplicity;
        r.passed = r.passed && ok;
        enumerations.push_back({{"n", n}, {"inputs", e.inputs}, {"distinct_pointed", e.distinct_pointed},
                                {"distinct_rooted", e.distinct_rooted}, {"expected_rooted", rooted},
                                {"uniform_multiplicity", e.uniform_multiplicity}, {"passed", ok}});
    }
    constexpr std::size_t samples = 100, faces = 10000;
    std::vector<char> ok(samples, 0);
    parallel_for(samples, cfg.threads, [&](std::size_t i) {
        auto rng = detail::stream(cfg, "cvs", i);
        const auto tree = sample_labeled_tree(faces, rng);
        const auto q = cvs_construct(tree, rng.uniform_index(2) == 0 ? 1 : -1);
        bool good = q.n_vertices == faces + 2 && q.n_edges() == 2 * faces && q.n_faces == faces;
        try {
            validate(q);
        } catch (const std::invalid_argument&) {
            good = false;
        }
        const auto d = bfs_metric(q, static_cast<std::size_t>(q.pointed_vertex));
        const auto lmin = *std::min_element(tree.labels.begin(), tree.labels.end());
        for (std::size_t v = 0; v <= faces && good; ++v) good = d[v] == tree.labels[v] - lmin + 1;
        ok[i] = good;
    });
    const auto good = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
    r.passed = r.passed && good == samples;
    r.metrics = {{"enumeration", enumerations}, {"samples", samples}, {"faces", faces}, {"samples_ok", good}};
    return r;
}

inline constexpr std::size_t kLargeQuad = 50000;

inline CheckResult check_ball_volume(const AcceptanceConfig& cfg) {
    CheckResult r{7, "ball_volume_exponent"};
    auto rng = detail::stream(cfg, "ball");
    const auto q = sample_quadrangulation(kLargeQuad, rng);
    const GraphSpace space(q);
    const std::vector<double> radii{2, 4, 8, 16, 32};
    std::vector<double> x, y;
    std::vector<double> mean_log(radii.size(), 0.0);
    constexpr std::size_t centers = 50;
    for (std::size_t c = 0; c < centers; ++c) {
        const auto d = space.distances_from(static_cast<std::size_t>(rng.uniform_index(space.size())));
        for (std::size_t k = 0; k < radii.size(); ++k) {
            const auto vol = std::count_if(d.begin(), d.end(), [&](double v) { return v <= radii[k]; });
            x.push_back(std::log(radii[k]));
            y.push_back(std::log(static_cast<double>(vol)));
            mean_log[k] += y.back() / static_cast<double>(centers);
        }
    }
    const auto fit = stats::least_squares(x, y);
    r.passed = fit.slope >= 3.3 && fit.slope <= 4.7;
    r.metrics = {{"faces", kLargeQuad}, {"centers", centers}, {"radii", radii}, {"mean_log_volume", mean_log},
                 {"log_total", std::log(static_cast<double>(space.size()))}, {"slope", fit.slope},
                 {"slope_stderr", fit.slope_stderr}, {"range", {3.3, 4.7}}};
    return r;
}

inline CheckResult check_two_samplers(const AcceptanceConfig& cfg) {
    CheckResult r{8, "two_sampler_agreement"};
    constexpr std::size_t quads = 200, per_quad = 500, snakes = 2000, per_snake = 50, grid = 2048;
    std::vector<std::vector<double>> qd(quads), sd(snakes);
    parallel_for(quads, cfg.threads, [&](std::size_t i) {
        auto rng = detail::stream(cfg, "agree.quad", i);
        const auto d = quad_root_distances(sample_quadrangulation(kLargeQuad, rng));
        for (std::size_t k = 0; k < per_quad; ++k) qd[i].push_back(d[static_cast<std::size_t>(rng.uniform_index(d.size()))]);
    });
    parallel_for(snakes, cfg.threads, [&](std::size_t i) {
        auto rng = detail::stream(cfg, "agree.snake", i);
        const auto d = distances_to_root(sample_brownian_snake(grid, rng));
        for (std::size_t k = 0; k < per_snake; ++k) sd[i].push_back(d[static_cast<std::size_t>(rng.uniform_index(d.size()))]);
    });
    std::vector<double> q, s;
    for (const auto& v : qd) q.insert(q.end(), v.begin(), v.end());
    for (const auto& v : sd) s.insert(s.end(), v.begin(), v.end());
    const double kappa = calibrate_scaling(q, s);
    for (auto& v : q) v *= kappa;
    const double ks = stats::ks_two_sample(q, s);
    r.passed = ks < 0.08;
    r.metrics = {{"faces", kLargeQuad}, {"quads", quads}, {"snake_grid", grid}, {"snakes", snakes},
                 {"kappa", kappa}, {"kappa_n_quarter", kappa * std::pow(static_cast<double>(kLargeQuad), 0.25)},
                 {"ks", ks}, {"threshold", 0.08}};
    return r;
}

// -----------------------------------------------------------------------------
// 9: merge PPP
// -----------------------------------------------------------------------------

inline CheckResult check_merge_ppp(const AcceptanceConfig& cfg) {
    CheckResult r{9, "merge_ppp_consistency"};
    constexpr std::size_t reps = 2000;
    constexpr double x_min = 0.01;
    const std::vector<double> depths{0.02, 0.05, 0.1}, lengths{0.25, 1.0};
    std::vector<std::vector<double>> counts(reps);
    parallel_for(reps, cfg.threads, [&](std::size_t i) {
        auto rng = detail::stream(cfg, "merge", i);
        const auto ppp = sample_merge_ppp(x_min, rng);
        for (double w : depths)
            for (double len : lengths) counts[i].push_back(static_cast<double>(ppp.count_above(w, len)));
    });
    r.passed = true;
    nlohmann::json rows = nlohmann::json::array();
    std::size_t col = 0;
    for (double w : depths)
        for (double len : lengths) {
            stats::Accumulator acc;
            for (const auto& c : counts) acc.add(c[col]);
            ++col;
            const double target = len / (2.0 * w * w);
            const bool ok = std::abs(acc.mean() - target) < 3.0 * acc.stderr_mean();
            r.passed = r.passed && ok;
            rows.push_back({{"w", w}, {"len", len}, {"mean", acc.mean()}, {"se", acc.stderr_mean()}, {"target", target},
                            {"dispersion", acc.variance() / acc.mean()}, {"passed", ok}});
        }
    r.metrics = {{"reps", reps}, {"x_min", x_min}, {"rows", rows}};
    return r;
}

// -----------------------------------------------------------------------------
// 10: geodesic analytics oracles
// -----------------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<std::size_t>> bundle_paths(const GeodesicBundle& b) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& p : b.paths) out.push_back(p.vertices);
    std::sort(out.begin(), out.end());
    return out;
}

inline GraphSpace random_graph(std::size_t n, double p, RngStream& rng) {
    EdgeList e;
    for (std::size_t i = 1; i < n; ++i) e.emplace_back(static_cast<std::size_t>(rng.uniform_index(i)), i);  // spanning tree
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) e.emplace_back(i, j);
    return GraphSpace(n, e);
}

}  // namespace detail

inline CheckResult check_geodesic_oracles(const AcceptanceConfig& cfg) {
    CheckResult r{10, "geodesic_oracles"};
    std::size_t zero_length = 0, bundle_cases = 0, bundle_fail = 0, star_cases = 0, star_fail = 0, class_cases = 0, class_fail = 0;
    auto compare_all_pairs = [&](const auto& space) {
        for (std::size_t a = 0; a < space.size(); ++a) {
            const auto da = space.distances_from(a);
            for (std::size_t b = 0; b < space.size(); ++b) {
                if (a == b) continue;
                if (da[b] == 0.0) {  // identified points of a quotient metric
                    ++zero_length;
                    continue;
                }
                const auto bundle = enumerate_geodesics(space, a, b);
                const double slack = default_slack(space, bundle.length);
                const auto bf = brute_force_geodesics(space, a, b, slack);
                ++bundle_cases;
                if (bundle.truncated || detail::bundle_paths(bundle) != bf) ++bundle_fail;
                // Classification of the brute-force set must agree with the bundle's.
                GeodesicBundle ref;
                ref.endpoints = {a, b};
                for (const auto& p : bf) ref.paths.push_back({p, std::vector<double>(p.size(), 0.0)});
                ++class_cases;
                if (!bundle.signature || classify_network(ref) != *bundle.signature) ++class_fail;
            }
        }
    };
    auto compare_stars = [&](const auto& space, std::size_t k, double radius) {
        for (std::size_t z = 0; z < space.size(); ++z) {
            const auto rep = star_at(space, z, k, radius);
            if (rep.skipped) continue;
            ++star_cases;
            if (rep.k != brute_force_star(space, z, k, radius) || rep.witnesses.size() != rep.k) ++star_fail;
        }
    };
    compare_all_pairs(path_graph(6));
    compare_all_pairs(cycle_graph(4));
    compare_all_pairs(cycle_graph(7));
    compare_all_pairs(grid_graph(3, 3));
    compare_stars(path_graph(7), 4, 2.0);
    compare_stars(star_graph(5, 2), 6, 2.0);
    compare_stars(grid_graph(3, 3), 4, 1.0);
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto rng = detail::stream(cfg, "geo.graph", s);
        const auto g = detail::random_graph(6 + static_cast<std::size_t>(rng.uniform_index(5)), 0.25, rng);
        compare_all_pairs(g);
        compare_stars(g, 4, 1.0);
        compare_stars(g, 4, 2.0);
    }
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto rng = detail::stream(cfg, "geo.metric", s);
        const auto map = quotient_metric(sample_brownian_snake(8, rng));
        compare_all_pairs(DenseMetricSpace(map.dmat, map.n));
    }
    nlohmann::json networks = nlohmann::json::array();
    bool networks_ok = true;
    for (auto [j, k] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {2, 2}, {3, 3}, {2, 3}, {3, 2}, {4, 1}}) {
        const auto f = normal_network(j, k);
        const auto sig = classify_network(enumerate_geodesics(f.space, f.u, f.v));
        const bool ok = sig == NetworkSignature{j, k, j - 1};
        networks_ok = networks_ok && ok;
        networks.push_back({{"j", j}, {"k", k}, {"signature", {sig.i, sig.j, sig.k}}, {"passed", ok}});
    }
    r.passed = bundle_fail == 0 && star_fail == 0 && class_fail == 0 && networks_ok;
    r.metrics = {{"bundle_cases", bundle_cases}, {"identified_pairs_skipped", zero_length}, {"bundle_mismatches", bundle_fail}, {"star_cases", star_cases},
                 {"star_mismatches", star_fail}, {"classification_cases", class_cases},
                 {"classification_mismatches", class_fail}, {"normal_networks", networks}};
    return r;
}

// -----------------------------------------------------------------------------
// 11: frame sparsity
// -----------------------------------------------------------------------------

inline CheckResult check_frame_sparsity(const AcceptanceConfig& cfg) {
    CheckResult r{11, "frame_sparsity"};
    auto rng = detail::stream(cfg, "frame");
    const auto q = sample_quadrangulation(kLargeQuad, rng);
    const GraphSpace space(q);
    const std::vector<double> scales{2, 4, 8, 16, 32};
    const auto frame = frame_box_dimension(space, 50, scales, rng);
    std::vector<std::size_t> all(space.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto whole = box_counting_dimension(space, all, scales);
    const bool slope_ok = frame.slope >= 0.7 && frame.slope <= 1.8;
    const bool gap_ok = whole.slope - frame.slope >= 1.0;

    std::vector<double> fractions;
    for (std::size_t n : {64, 128, 256}) {
        auto rg = detail::stream(cfg, "frame.gff", n);
        const auto field = sample_dgff(n, rg);
        const auto pairs = boundary_pairs(n, 20, rg);
        const auto bundles = gff_geodesic_bundle(field, kGffGamma, pairs, {}, cfg.threads);
        fractions.push_back(frame_vertex_fraction(field.values.size(), bundles));
    }
    const bool trend_ok = fractions[0] > fractions[1] && fractions[1] > fractions[2];
    r.passed = slope_ok && gap_ok && trend_ok;
    r.metrics = {{"faces", kLargeQuad}, {"pairs", 50}, {"scales", scales}, {"frame_counts", frame.counts},
                 {"frame_slope", frame.slope}, {"frame_stderr", frame.stderr_slope}, {"frame_points", frame.point_count},
                 {"space_counts", whole.counts}, {"space_slope", whole.slope}, {"slope_gap", whole.slope - frame.slope},
                 {"frame_slope_ok", slope_ok}, {"gap_ok", gap_ok}, {"gff_sizes", {64, 128, 256}},
                 {"gff_frame_fraction", fractions}, {"gff_trend_ok", trend_ok}};
    return r;
}

// -----------------------------------------------------------------------------
// 12: DGFF law
// -----------------------------------------------------------------------------

inline CheckResult check_dgff(const AcceptanceConfig& cfg) {
    CheckResult r{12, "dgff_law"};
    constexpr std::size_t n = 9, fields = 10000;
    const std::size_t m = n - 2;
    const auto green = dirichlet_green_function(n);
    const std::size_t c = (m / 2) * m + m / 2;  // interior index of the center
    const std::size_t nb = c + 1;               // its right neighbor
    std::vector<double> hc(fields), hn(fields);
    parallel_for(fields, cfg.threads, [&](std::size_t i) {
        auto rng = detail::stream(cfg, "dgff", i);
        const auto f = sample_dgff(n, rng);
        hc[i] = f.at(m / 2 + 1, m / 2 + 1);
        hn[i] = f.at(m / 2 + 2, m / 2 + 1);
    });
    stats::Accumulator var, cov;
    for (std::size_t i = 0; i < fields; ++i) {
        var.add(hc[i] * hc[i]);
        cov.add(hc[i] * hn[i]);
    }
    const double g_cc = green[c * m * m + c], g_cn = green[c * m * m + nb];
    const bool var_ok = std::abs(var.mean() - g_cc) < 3.0 * var.stderr_mean();
    const bool cov_ok = std::abs(cov.mean() - g_cn) < 3.0 * cov.stderr_mean();

    // path_length fixtures
    GffField zero;
    zero.n = 6;
    zero.values.assign(36, 0.0);
    const std::vector<std::size_t> line{7, 8, 9, 10, 16, 22};
    GffField bump = zero;
    bump.values[14] = std::log(2.0);
    const std::vector<std::size_t> single{14};
    const double l_zero = path_length(zero, kGffGamma, line);
    const double l_bump = path_length(bump, 1.0, single);
    const bool fixtures_ok = l_zero == 6.0 && std::abs(l_bump - 2.0) <= 4.0 * std::numeric_limits<double>::epsilon();
    r.passed = var_ok && cov_ok && fixtures_ok;
    r.metrics = {{"n", n}, {"fields", fields}, {"center_variance", var.mean()}, {"variance_se", var.stderr_mean()},
                 {"green_diagonal", g_cc}, {"neighbor_covariance", cov.mean()}, {"covariance_se", cov.stderr_mean()},
                 {"green_offdiagonal", g_cn}, {"path_length_zero_field", l_zero}, {"path_length_ln2", l_bump},
                 {"fixtures_ok", fixtures_ok}};
    return r;
}

// -----------------------------------------------------------------------------
// 13: strong confluence report
// -----------------------------------------------------------------------------

inline CheckResult check_strong_confluence(const AcceptanceConfig& cfg) {
    CheckResult r{13, "strong_confluence"};
    auto rng = detail::stream(cfg, "confluence");
    const auto q = sample_quadrangulation(kLargeQuad, rng);
    const GraphSpace space(q);
    const std::vector<double> eps{1, 2, 3, 4, 6, 8};
    const auto table = strong_confluence_statistic(space, eps, rng);
    std::size_t zero_pairs = 0, zero_bad = 0;
    for (const auto& s : table.samples)
        if (s.hausdorff == 0.0) {
            ++zero_pairs;
            if (s.deficit != 0.0) ++zero_bad;
        }
    // Reported fit of mean deficit against c * eps * log(1 / eps), lengths in units of the root eccentricity.
    double diam = 0.0;
    {
        const auto d = space.distances_from(static_cast<std::size_t>(q.pointed_vertex));
        for (double v : d) diam = std::max(diam, v);
    }
    double sxy = 0.0, sxx = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"epsilon", row.epsilon}, {"pairs", row.pairs}, {"mean_deficit", row.mean_deficit},
                        {"stderr", row.stderr_deficit}, {"empty", row.empty}});
        if (row.empty) continue;
        const double e = row.epsilon / diam;
        const double xv = e * std::log(1.0 / e);
        sxy += xv * row.mean_deficit / diam;
        sxx += xv * xv;
    }
    r.passed = zero_pairs > 0 && zero_bad == 0 && table.violation_mass < 0.05;
    r.metrics = {{"faces", kLargeQuad}, {"samples", table.samples.size()}, {"rows", rows},
                 {"hausdorff_zero_pairs", zero_pairs}, {"hausdorff_zero_nonzero_deficit", zero_bad},
                 {"violation_mass", table.violation_mass}, {"fitted_c", sxx > 0 ? sxy / sxx : 0.0},
                 {"diameter_scale", diam}};
    return r;
}

// -----------------------------------------------------------------------------
// 14: determinism
// -----------------------------------------------------------------------------

inline CheckResult check_determinism(const AcceptanceConfig& cfg) {
    CheckResult r{14, "determinism"};
    using io::Format;
    struct Case {
        std::string command;
        std::map<std::string, std::string> overrides;
    };
    const std::vector<Case> cases{
        {"sample-snake", {{"n", "64"}}},
        {"sample-quad", {{"n", "500"}, {"samples", "3"}, {"calibrate_snakes", "4"}, {"snake_n", "128"}}},
        {"csbp", {{"reps", "200"}}},
        {"merge-ppp", {{"reps", "50"}, {"x_min", "0.05"}}},
        {"gff", {{"n", "24"}, {"pairs", "4"}}},
    };
    const auto specs = io::command_specs();
    r.passed = true;
    nlohmann::json rows = nlohmann::json::array();
    auto same = [](const io::CommandOutput& a, const io::CommandOutput& b) {
        if (a.files.size() != b.files.size() || a.results != b.results) return false;
        for (std::size_t i = 0; i < a.files.size(); ++i)
            if (a.files[i].suffix != b.files[i].suffix || a.files[i].bytes != b.files[i].bytes) return false;
        return true;
    };
    std::string quad_bytes;
    for (const auto& c : cases) {
        const auto* spec = io::find_command(specs, c.command);
        auto params = spec->defaults;
        for (const auto& [k, v] : c.overrides) params[k] = v;
        const io::ParamSet ps(params);
        bool ok = true;
        for (Format f : {Format::json, Format::csv}) {
            const auto first = spec->run(ps, cfg.seed, 1, f);
            const auto second = spec->run(ps, cfg.seed, 2, f);
            ok = ok && same(first, second);
            if (c.command == "sample-quad" && f == Format::json) quad_bytes = first.files.front().bytes;
        }
        r.passed = r.passed && ok;
        rows.push_back({{"command", c.command}, {"identical", ok}});
    }
    {
        const auto* spec = io::find_command(specs, "analyze");
        auto params = spec->defaults;
        params["pairs"] = "5";
        params["centers"] = "5";
        params["frame_pairs"] = "5";
        params["scales"] = "1,2,4,10";
        const io::ParamSet ps(params);
        const auto first = io::run_analyze_bytes(quad_bytes, ps, cfg.seed, 1, Format::json);
        const auto second = io::run_analyze_bytes(quad_bytes, ps, cfg.seed, 2, Format::json);
        const bool ok = same(first, second);
        r.passed = r.passed && ok;
        rows.push_back({{"command", "analyze"}, {"identical", ok}});
    }
    r.metrics = {{"commands", rows}};
    return r;
}

// -----------------------------------------------------------------------------
// Suite
// -----------------------------------------------------------------------------

struct CheckEntry {
    int id;
    std::string name;
    std::function<CheckResult(const AcceptanceConfig&)> run;
};

inline std::vector<CheckEntry> primary_suite() {
    return {{1, "csbp_laplace_law", check_csbp_laplace},
            {2, "csbp_extinction_law", check_csbp_extinction},
            {3, "csbp_scaling", check_csbp_scaling},
            {4, "lamperti_round_trip", check_lamperti_round_trip},
            {5, "snake_map_invariants", check_snake_invariants},
            {6, "cvs_correctness", check_cvs},
            {7, "ball_volume_exponent", check_ball_volume},
            {8, "two_sampler_agreement", check_two_samplers},
            {9, "merge_ppp_consistency", check_merge_ppp},
            {10, "geodesic_oracles", check_geodesic_oracles},
            {11, "frame_sparsity", check_frame_sparsity},
            {12, "dgff_law", check_dgff},
            {13, "strong_confluence", check_strong_confluence},
            {14, "determinism", check_determinism}};
}

}  // namespace bml::verify
