#pragma once

// Experiment producers behind the command-line subcommands. Each producer is
// a pure function of (parameters, seed): it returns the bytes of every file
// it wants written, so reruns can be compared byte for byte.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bml/core/parallel.hpp"
#include "bml/core/rng.hpp"
#include "bml/core/stats.hpp"
#include "bml/csbp.hpp"
#include "bml/geodesic.hpp"
#include "bml/gff.hpp"
#include "bml/io/config.hpp"
#include "bml/planar_map.hpp"
#include "bml/snake_map.hpp"

namespace bml::io {

enum class Format { json, csv };

/// Resolved parameters (strings already checked against the schema).
class ParamSet {
public:
    ParamSet() = default;
    explicit ParamSet(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    [[nodiscard]] const std::string& str(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw config_error("missing parameter '" + key + "'");
        return it->second;
    }
    [[nodiscard]] double real(const std::string& key) const { return std::stod(str(key)); }
    [[nodiscard]] long long integer(const std::string& key) const { return std::stoll(str(key)); }
    [[nodiscard]] std::size_t count(const std::string& key) const {
        const auto v = integer(key);
        if (v < 0) throw std::invalid_argument("parameter '" + key + "' must be nonnegative");
        return static_cast<std::size_t>(v);
    }
    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }
    [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// One output file. An empty suffix marks the primary file (the --out path);
/// other files are written next to it as <out><suffix>.
struct OutputFile {
    std::string suffix;
    std::string bytes;
};

struct CommandOutput {
    std::vector<OutputFile> files;
    /// Summary values copied into the run manifest.
    std::map<std::string, std::string> results;
};

struct CommandSpec {
    std::string name;
    std::string description;
    Schema schema;
    std::map<std::string, std::string> defaults;
    /// Extension of the primary file for each format.
    std::function<std::string(Format)> primary_extension;
    std::function<CommandOutput(const ParamSet&, std::uint64_t seed, unsigned threads, Format)> run;
};

// -----------------------------------------------------------------------------
// Record encoding
// -----------------------------------------------------------------------------

inline std::string number_text(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// JSON-lines, one record per line.
inline std::string encode_jsonl(const std::vector<nlohmann::json>& records) {
    std::string out;
    for (const auto& r : records) out += r.dump() + "\n";
    return out;
}

namespace detail {

inline void flatten(const nlohmann::json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else if (j.is_number_float()) {
        out.emplace_back(prefix, number_text(j.get<double>()));
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

}  // namespace detail

inline std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
    std::string q = "\"";
    for (char ch : v) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

/// Long-format CSV: record,field,value with nested fields dotted.
inline std::string encode_long_csv(const std::vector<nlohmann::json>& records) {
    std::string out = "record,field,value\n";
    for (std::size_t r = 0; r < records.size(); ++r) {
        std::vector<std::pair<std::string, std::string>> rows;
        detail::flatten(records[r], "", rows);
        for (const auto& [k, v] : rows) out += std::to_string(r) + "," + csv_field(k) + "," + csv_field(v) + "\n";
    }
    return out;
}

inline std::string encode_records(const std::vector<nlohmann::json>& records, Format f) {
    return f == Format::json ? encode_jsonl(records) : encode_long_csv(records);
}

inline std::string record_extension(Format f) { return f == Format::json ? ".jsonl" : ".csv"; }

inline std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = trim(item);
        if (t.empty()) continue;
        check_value("list", t, ValueType::real);
        out.push_back(std::stod(std::string(t)));
    }
    return out;
}

// -----------------------------------------------------------------------------
// Producers
// -----------------------------------------------------------------------------

inline CommandOutput run_sample_snake(const ParamSet& p, std::uint64_t seed, unsigned threads, Format f) {
    const auto n = p.count("n");
    auto rng = derive_stream(seed, "sample-snake", 0);
    const auto snake = sample_brownian_snake(n, rng);
    QuotientOptions opt;
    opt.threads = threads;
    opt.max_points = p.count("max_points");
    const auto map = quotient_metric(snake, opt);
    std::ostringstream bin(std::ios::binary);
    write_dmat_binary(bin, map, seed);
    double diameter = 0.0;
    for (double d : map.dmat) diameter = std::max(diameter, d);
    nlohmann::json rec = {{"n", n}, {"seed", seed}, {"root_index", map.root_index}, {"diameter", diameter},
                          {"generic", map.generic}, {"y_min", snake.y_min()}};
    CommandOutput out;
    out.files.push_back({"", bin.str()});
    std::ostringstream csv;
    write_map_csv(csv, map);
    out.files.push_back({".points.csv", csv.str()});
    out.files.push_back({".records" + record_extension(f), encode_records({rec}, f)});
    out.results = {{"diameter", number_text(diameter)}, {"root_index", std::to_string(map.root_index)}};
    return out;
}

inline nlohmann::json quad_record(const Quadrangulation& q, std::size_t sample, std::uint64_t seed) {
    const auto d = bfs_metric(q, static_cast<std::size_t>(q.pointed_vertex));
    std::int32_t diameter_from_root = 0;
    for (auto v : d) diameter_from_root = std::max(diameter_from_root, v);
    std::vector<std::size_t> hist(static_cast<std::size_t>(diameter_from_root) + 1, 0);
    for (auto v : d) ++hist[static_cast<std::size_t>(v)];
    return {{"n", q.n_faces}, {"seed", seed}, {"sample", sample}, {"eccentricity", diameter_from_root},
            {"distance_histogram", hist}};
}

inline CommandOutput run_sample_quad(const ParamSet& p, std::uint64_t seed, unsigned threads, Format f) {
    const auto n = p.count("n");
    const auto samples = p.count("samples");
    bml::detail::require(samples >= 1, "sample-quad: samples must be >= 1");
    std::vector<nlohmann::json> records(samples);
    std::vector<std::vector<double>> quad_d(samples);
    std::string first_map;
    parallel_for(samples, threads, [&](std::size_t i) {
        auto rng = derive_stream(seed, "sample-quad", i);
        const auto q = sample_quadrangulation(n, rng);
        validate(q);
        records[i] = quad_record(q, i, seed);
        quad_d[i] = quad_root_distances(q);
        if (i == 0) first_map = to_json(q, seed).dump() + "\n";
    });
    CommandOutput out;
    out.files.push_back({"", first_map});
    const auto snakes = p.count("calibrate_snakes");
    if (snakes > 0) {
        const auto grid = p.count("snake_n");
        std::vector<std::vector<double>> snake_d(snakes);
        parallel_for(snakes, threads, [&](std::size_t i) {
            auto rng = derive_stream(seed, "sample-quad.snake", i);
            snake_d[i] = distances_to_root(sample_brownian_snake(grid, rng));
        });
        std::vector<double> qs, ss;
        for (const auto& v : quad_d) qs.insert(qs.end(), v.begin(), v.end());
        for (const auto& v : snake_d) ss.insert(ss.end(), v.begin(), v.end());
        const double kappa = calibrate_scaling(qs, ss);
        records.push_back({{"kappa", kappa}, {"kappa_n_quarter", kappa * std::pow(static_cast<double>(n), 0.25)},
                           {"snake_grid", grid}, {"snakes", snakes}});
        out.results["kappa"] = number_text(kappa);
    }
    out.files.push_back({".records" + record_extension(f), encode_records(records, f)});
    return out;
}

inline CommandOutput run_csbp(const ParamSet& p, std::uint64_t seed, unsigned threads, Format f) {
    const double alpha = p.real("alpha"), c = p.real("c"), y0 = p.real("y0"), t = p.real("t"), lambda = p.real("lambda");
    const double dt = p.real("dt");
    const auto reps = p.count("reps");
    bml::detail::require(reps >= 2, "csbp: reps must be >= 2");
    bml::detail::require(lambda >= 0.0 && t >= 0.0, "csbp: t and lambda must be >= 0");
    std::vector<double> value(reps);
    parallel_for(reps, threads, [&](std::size_t i) {
        auto rng = derive_stream(seed, "csbp", i);
        value[i] = sample_csbp(alpha, c, y0, t, dt, rng).value_at(t);
    });
    stats::Accumulator lap, surv;
    for (double v : value) {
        lap.add(std::exp(-lambda * v));
        surv.add(v > 0.0 ? 1.0 : 0.0);
    }
    const nlohmann::json rec = {
        {"alpha", alpha}, {"c", c}, {"y0", y0}, {"t", t}, {"lambda", lambda}, {"reps", reps}, {"dt", dt},
        {"estimate", lap.mean()}, {"se", lap.stderr_mean()}, {"target", csbp_laplace(alpha, c, y0, lambda, t)},
        {"survival", surv.mean()}, {"survival_se", surv.stderr_mean()},
        {"survival_target", t > 0.0 ? extinction_prob(alpha, c, y0, t) : 1.0}};
    CommandOutput out;
    out.files.push_back({"", encode_records({rec}, f)});
    out.results = {{"estimate", number_text(lap.mean())}, {"se", number_text(lap.stderr_mean())}};
    return out;
}

inline CommandOutput run_merge_ppp(const ParamSet& p, std::uint64_t seed, unsigned threads, Format f) {
    const double x_min = p.real("x_min"), w = p.real("w"), len = p.real("len");
    const auto reps = p.count("reps");
    bml::detail::require(reps >= 2, "merge-ppp: reps must be >= 2");
    bml::detail::require(w >= x_min, "merge-ppp: w must be >= x_min");
    bml::detail::require(len > 0.0 && len <= 1.0, "merge-ppp: len must lie in (0, 1]");
    std::vector<double> counts(reps);
    parallel_for(reps, threads, [&](std::size_t i) {
        auto rng = derive_stream(seed, "merge-ppp", i);
        counts[i] = static_cast<double>(sample_merge_ppp(x_min, rng).count_above(w, len));
    });
    const auto acc = stats::summarize(counts);
    const double target = len / (2.0 * w * w);
    const nlohmann::json rec = {{"x_min", x_min}, {"w", w}, {"len", len}, {"reps", reps}, {"mean", acc.mean()},
                                {"se", acc.stderr_mean()}, {"variance", acc.variance()}, {"target", target},
                                {"dispersion", acc.mean() > 0 ? acc.variance() / acc.mean() : 0.0}};
    CommandOutput out;
    out.files.push_back({"", encode_records({rec}, f)});
    out.results = {{"mean", number_text(acc.mean())}, {"target", number_text(target)}};
    return out;
}

inline CommandOutput run_gff(const ParamSet& p, std::uint64_t seed, unsigned threads, Format f) {
    const auto n = p.count("n");
    const auto pairs = p.count("pairs");
    const double gamma = p.real("gamma");
    auto rng = derive_stream(seed, "gff", 0);
    const auto field = sample_dgff(n, rng);
    const auto endpoints = boundary_pairs(n, pairs, rng);
    const auto bundles = gff_geodesic_bundle(field, gamma, endpoints, {}, threads);
    const GffSpace space(field, gamma);
    std::vector<nlohmann::json> records;
    for (const auto& b : bundles)
        records.push_back({{"a", b.endpoints.first}, {"b", b.endpoints.second},
                           {"length", b.paths.empty() ? 0.0 : space.vertex_length(b.paths.front())},
                           {"paths", b.total_count}, {"truncated", b.truncated},
                           {"vertices", b.paths.empty() ? 0 : b.paths.front().vertices.size()}});
    const auto mult = geodesic_multiplicity(field.values.size(), bundles);
    const double fraction = frame_vertex_fraction(field.values.size(), bundles);
    records.push_back({{"n", n}, {"gamma", gamma}, {"pairs", pairs}, {"frame_fraction", fraction},
                       {"laplacian", "unit conductances, Dirichlet boundary"}});
    CommandOutput out;
    out.files.push_back({"", encode_records(records, f)});
    std::ostringstream field_csv, overlay_csv, svg;
    write_field_csv(field_csv, field);
    write_overlay_csv(overlay_csv, n, mult);
    write_overlay_svg(svg, field, mult);
    out.files.push_back({".field.csv", field_csv.str()});
    out.files.push_back({".overlay.csv", overlay_csv.str()});
    out.files.push_back({".overlay.svg", svg.str()});
    out.results = {{"frame_fraction", number_text(fraction)},
                   {"dgff_normalization", "E[h(x)h(y)] = G(x,y), G the Green function of the unit-conductance Laplacian with Dirichlet boundary"}};
    return out;
}

template <GeodesicSpace S>
std::vector<nlohmann::json> analyze_space(const S& space, const ParamSet& p, std::uint64_t seed, unsigned threads) {
    std::vector<nlohmann::json> records;
    const auto pairs = p.count("pairs");
    const auto cap = p.count("cap");
    bml::detail::require(space.size() >= 2, "analyze: space needs at least 2 points");
    // Bundles for random pairs.
    std::vector<std::pair<std::size_t, std::size_t>> ends(pairs);
    {
        auto rng = derive_stream(seed, "analyze.pairs", 0);
        for (auto& e : ends) {
            e.first = static_cast<std::size_t>(rng.uniform_index(space.size()));
            e.second = static_cast<std::size_t>(rng.uniform_index(space.size() - 1));
            if (e.second >= e.first) ++e.second;
        }
    }
    std::vector<nlohmann::json> bundle_rec(pairs);
    parallel_for(pairs, threads, [&](std::size_t i) {
        GeodesicOptions opt;
        opt.cap = cap;
        const auto b = enumerate_geodesics(space, ends[i].first, ends[i].second, opt);
        nlohmann::json r = {{"type", "bundle"}, {"a", b.endpoints.first}, {"b", b.endpoints.second},
                            {"length", b.length}, {"count", b.total_count}, {"truncated", b.truncated}};
        if (b.signature) r["signature"] = {b.signature->i, b.signature->j, b.signature->k};
        bundle_rec[i] = r;
    });
    records.insert(records.end(), bundle_rec.begin(), bundle_rec.end());

    // Star census.
    {
        auto rng = derive_stream(seed, "analyze.stars", 0);
        const auto reports = star_census(space, p.count("k"), p.real("radius"), p.count("centers"), rng);
        std::map<std::size_t, std::size_t> hist;
        std::size_t skipped = 0;
        for (const auto& r : reports) {
            if (r.skipped)
                ++skipped;
            else
                ++hist[r.k];
        }
        nlohmann::json h = nlohmann::json::object();
        for (auto [m, c] : hist) h[std::to_string(m)] = c;
        records.push_back({{"type", "star_census"}, {"k", p.count("k")}, {"radius", p.real("radius")},
                           {"centers", p.count("centers")}, {"skipped", skipped}, {"histogram", h}});
    }

    // Frame dimension against the whole space.
    const auto scales = parse_real_list(p.str("scales"));
    {
        auto rng = derive_stream(seed, "analyze.frame", 0);
        const auto frame = frame_box_dimension(space, p.count("frame_pairs"), scales, rng);
        std::vector<std::size_t> all(space.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const auto whole = box_counting_dimension(space, all, scales);
        records.push_back({{"type", "frame_dimension"}, {"scales", scales}, {"frame_counts", frame.counts},
                           {"frame_slope", frame.slope}, {"frame_stderr", frame.stderr_slope},
                           {"frame_points", frame.point_count}, {"space_counts", whole.counts},
                           {"space_slope", whole.slope}, {"space_stderr", whole.stderr_slope}});
    }

    // Strong confluence when the space is large enough.
    if (space.size() >= 1000) {
        auto rng = derive_stream(seed, "analyze.confluence", 0);
        const auto eps = parse_real_list(p.str("epsilons"));
        ConfluenceOptions copt;
        copt.pairs = p.count("confluence_pairs");
        const auto table = strong_confluence_statistic(space, eps, rng, copt);
        for (const auto& row : table.rows)
            records.push_back({{"type", "confluence"}, {"epsilon", row.epsilon}, {"pairs", row.pairs},
                               {"mean_deficit", row.mean_deficit}, {"stderr", row.stderr_deficit}, {"empty", row.empty}});
        records.push_back({{"type", "confluence_monotonicity"}, {"violation_mass", table.violation_mass}});
    }
    return records;
}

/// Loads a bml-quad JSON document or a bml-dmat binary from bytes.
inline CommandOutput run_analyze_bytes(const std::string& bytes, const ParamSet& p, std::uint64_t seed, unsigned threads,
                                       Format f) {
    std::vector<nlohmann::json> records;
    if (bytes.rfind(std::string(kDmatMagic, sizeof kDmatMagic), 0) == 0) {
        std::istringstream is(bytes, std::ios::binary);
        auto file = read_dmat_binary(is);
        const DenseMetricSpace space(std::move(file.dmat), file.n);
        records.push_back({{"type", "input"}, {"format", "bml-dmat"}, {"points", file.n}});
        auto more = analyze_space(space, p, seed, threads);
        records.insert(records.end(), more.begin(), more.end());
    } else {
        const auto q = quadrangulation_from_json(nlohmann::json::parse(bytes));
        const GraphSpace space(q);
        records.push_back({{"type", "input"}, {"format", "bml-quad"}, {"points", q.n_vertices}});
        auto more = analyze_space(space, p, seed, threads);
        records.insert(records.end(), more.begin(), more.end());
    }
    CommandOutput out;
    out.files.push_back({"", encode_records(records, f)});
    return out;
}

inline CommandOutput run_analyze(const ParamSet& p, std::uint64_t seed, unsigned threads, Format f) {
    std::ifstream in(p.str("input"), std::ios::binary);
    if (!in) throw std::invalid_argument("analyze: cannot open input '" + p.str("input") + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return run_analyze_bytes(ss.str(), p, seed, threads, f);
}

// -----------------------------------------------------------------------------
// Registry
// -----------------------------------------------------------------------------

inline std::vector<CommandSpec> command_specs() {
    using VT = ValueType;
    auto records_ext = [](Format f) { return record_extension(f); };
    std::vector<CommandSpec> specs;
    specs.push_back({"sample-snake", "Brownian snake map: binary distance matrix, point table, summary record",
                     {{"n", VT::integer}, {"max_points", VT::integer}},
                     {{"n", "512"}, {"max_points", "4096"}},
                     [](Format) { return std::string(".bin"); }, run_sample_snake});
    specs.push_back({"sample-quad", "Uniform quadrangulations via the CVS bijection",
                     {{"n", VT::integer}, {"samples", VT::integer}, {"calibrate_snakes", VT::integer}, {"snake_n", VT::integer}},
                     {{"n", "10000"}, {"samples", "1"}, {"calibrate_snakes", "0"}, {"snake_n", "2048"}},
                     [](Format) { return std::string(".json"); }, run_sample_quad});
    specs.push_back({"csbp", "Monte Carlo Laplace transform and survival of a stable CSBP",
                     {{"alpha", VT::real}, {"c", VT::real}, {"y0", VT::real}, {"t", VT::real}, {"lambda", VT::real},
                      {"reps", VT::integer}, {"dt", VT::real}},
                     {{"alpha", "1.5"}, {"c", "1"}, {"y0", "1"}, {"t", "1"}, {"lambda", "1"}, {"reps", "100000"}, {"dt", "0.001"}},
                     records_ext, run_csbp});
    specs.push_back({"merge-ppp", "Counts of merge points above a depth in the merge Poisson process",
                     {{"x_min", VT::real}, {"w", VT::real}, {"len", VT::real}, {"reps", VT::integer}},
                     {{"x_min", "0.01"}, {"w", "0.05"}, {"len", "1"}, {"reps", "1000"}},
                     records_ext, run_merge_ppp});
    specs.push_back({"gff", "Discrete GFF and geodesics of the exp(gamma h) vertex-weight metric",
                     {{"n", VT::integer}, {"pairs", VT::integer}, {"gamma", VT::real}},
                     {{"n", "128"}, {"pairs", "20"}, {"gamma", number_text(kGffGamma)}},
                     records_ext, run_gff});
    specs.push_back({"analyze", "Geodesic analytics on a saved map (bml-quad JSON or bml-dmat binary)",
                     {{"input", VT::string}, {"pairs", VT::integer}, {"cap", VT::integer}, {"k", VT::integer},
                      {"radius", VT::real}, {"centers", VT::integer}, {"frame_pairs", VT::integer},
                      {"scales", VT::string}, {"epsilons", VT::string}, {"confluence_pairs", VT::integer}},
                     {{"pairs", "20"}, {"cap", "4096"}, {"k", "6"}, {"radius", "3"}, {"centers", "50"},
                      {"frame_pairs", "50"}, {"scales", "2,4,8,16,32"}, {"epsilons", "1,2,3,4,6,8"},
                      {"confluence_pairs", "200"}},
                     records_ext, run_analyze});
    return specs;
}

inline const CommandSpec* find_command(const std::vector<CommandSpec>& specs, const std::string& name) {
    for (const auto& s : specs)
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace bml::io
