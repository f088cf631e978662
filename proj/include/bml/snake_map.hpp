#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bml/core/errors.hpp"
#include "bml/core/parallel.hpp"
#include "bml/core/rng.hpp"
#include "bml/stochastic.hpp"

namespace bml {

/// Finite pseudometric approximation of the Brownian map on the grid points
/// of a snake sample. Point i is the image of grid time i.
struct DiscreteBrownianMap {
    std::size_t n = 0;
    std::vector<double> dmat;  // row-major n x n
    std::size_t root_index = 0;
    std::size_t dual_root_index = 0;
    std::vector<double> grid_times;
    std::vector<double> x_values;
    std::vector<double> y_values;
    /// identified[i] is the smallest index at pseudodistance 0 from i.
    std::vector<std::size_t> identified;
    /// False when the label minimum is attained at several grid points.
    bool generic = true;

    [[nodiscard]] double distance(std::size_t i, std::size_t j) const noexcept { return dmat[i * n + j]; }
    [[nodiscard]] double mass() const noexcept { return n ? 1.0 / static_cast<double>(n) : 0.0; }
    [[nodiscard]] std::size_t size() const noexcept { return n; }
};

// -----------------------------------------------------------------------------
// Seed pseudometric
// -----------------------------------------------------------------------------

/// Y_i + Y_j - 2 max(min Y over [i..j], min Y over the wrap-around arc).
/// The wrap-around arc runs j..n-1 then 0..i and so contains both endpoints.
inline double d_circ(const BrownianSnakeSample& snake, std::size_t i, std::size_t j) {
    const auto& y = snake.y_values;
    detail::require(i < y.size() && j < y.size(), "d_circ: index out of range");
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    double inner = std::numeric_limits<double>::infinity();
    for (std::size_t k = i; k <= j; ++k) inner = std::min(inner, y[k]);
    double outer = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= i; ++k) outer = std::min(outer, y[k]);
    for (std::size_t k = j; k < y.size(); ++k) outer = std::min(outer, y[k]);
    return y[i] + y[j] - 2.0 * std::max(inner, outer);
}

/// All-pairs d_circ in O(n^2).
inline std::vector<double> d_circ_matrix(const BrownianSnakeSample& snake) {
    const auto& y = snake.y_values;
    const std::size_t n = y.size();
    std::vector<double> prefix(n), suffix(n);
    prefix[0] = y[0];
    for (std::size_t k = 1; k < n; ++k) prefix[k] = std::min(prefix[k - 1], y[k]);
    suffix[n - 1] = y[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) suffix[k] = std::min(suffix[k + 1], y[k]);
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double inner = y[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            inner = std::min(inner, y[j]);
            const double outer = std::min(prefix[i], suffix[j]);
            const double v = y[i] + y[j] - 2.0 * std::max(inner, outer);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    return d;
}

/// Distances to the root without building the full map: Y_i - min Y.
inline std::vector<double> distances_to_root(const BrownianSnakeSample& snake) {
    std::vector<double> d(snake.size());
    const double m = snake.y_min();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = snake.y_values[i] - m;
    return d;
}

// -----------------------------------------------------------------------------
// Metric closure
// -----------------------------------------------------------------------------

struct QuotientOptions {
    /// Largest accepted point count; the closure costs O(n^3).
    std::size_t max_points = 4096;
    /// Floyd-Warshall up to this size, per-source dense Dijkstra above.
    std::size_t floyd_limit = 1024;
    unsigned threads = 1;
    double identify_tolerance = 1e-12;
};

namespace detail {

inline void floyd_warshall(std::vector<double>& d, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double* rowk = d.data() + k * n;
        for (std::size_t i = 0; i < n; ++i) {
            double* rowi = d.data() + i * n;
            const double dik = rowi[k];
            for (std::size_t j = 0; j < n; ++j) rowi[j] = std::min(rowi[j], dik + rowk[j]);
        }
    }
}

// Array-based Dijkstra on the complete graph: O(n^2) per source, which is
// optimal for dense weights.
inline void dense_dijkstra_row(const std::vector<double>& w, std::size_t n, std::size_t src, double* out) {
    std::vector<char> done(n, 0);
    for (std::size_t j = 0; j < n; ++j) out[j] = w[src * n + j];
    out[src] = 0.0;
    done[src] = 1;
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t u = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (!done[j] && out[j] < best) {
                best = out[j];
                u = j;
            }
        if (u == n) break;
        done[u] = 1;
        const double* wu = w.data() + u * n;
        for (std::size_t j = 0; j < n; ++j)
            if (!done[j]) out[j] = std::min(out[j], best + wu[j]);
    }
}

inline std::vector<std::size_t> identification_classes(const std::vector<double>& d, std::size_t n, double tol) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[i * n + j] <= tol) {
                const auto a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::size_t> cls(n);
    for (std::size_t i = 0; i < n; ++i) cls[i] = find(i);
    return cls;
}

}  // namespace detail

/// Largest pseudometric dominated by d_circ: the shortest-path closure of the
/// complete graph with d_circ edge weights (chain infimum over finitely many
/// points). Points at pseudodistance 0 stay distinct and are tagged.
inline DiscreteBrownianMap quotient_metric(const BrownianSnakeSample& snake, const QuotientOptions& opt = {}) {
    const std::size_t n = snake.size();
    detail::require(n >= 2, "quotient_metric: snake needs at least 2 points");
    if (n > opt.max_points)
        throw resource_limit_error("quotient_metric: " + std::to_string(n) + " points exceeds the cap of " +
                                   std::to_string(opt.max_points));
    DiscreteBrownianMap map;
    map.n = n;
    map.root_index = snake.s_star_index;
    map.dual_root_index = 0;
    map.generic = !snake.argmin_tie;
    map.grid_times = snake.x_path.times;
    map.x_values = snake.x_path.values;
    map.y_values = snake.y_values;

    auto seed = d_circ_matrix(snake);
    if (n <= opt.floyd_limit) {
        detail::floyd_warshall(seed, n);
        map.dmat = std::move(seed);
    } else {
        map.dmat.assign(n * n, 0.0);
        parallel_for(n, opt.threads, [&](std::size_t src) { detail::dense_dijkstra_row(seed, n, src, map.dmat.data() + src * n); });
        // Symmetrize roundoff differences between the two directions.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = std::min(map.dmat[i * n + j], map.dmat[j * n + i]);
                map.dmat[i * n + j] = map.dmat[j * n + i] = v;
            }
    }
    for (std::size_t i = 0; i < n; ++i) map.dmat[i * n + i] = 0.0;
    map.identified = detail::identification_classes(map.dmat, n, opt.identify_tolerance);
    return map;
}

/// Two independent uniform indices (root and dual root resampled from the mass measure).
inline std::pair<std::size_t, std::size_t> resample_marked_points(const DiscreteBrownianMap& map, RngStream& rng) {
    detail::require(map.n > 0, "resample_marked_points: empty map");
    const auto a = static_cast<std::size_t>(rng.uniform_index(map.n));
    const auto b = static_cast<std::size_t>(rng.uniform_index(map.n));
    return {a, b};
}

// -----------------------------------------------------------------------------
// Persistence
// -----------------------------------------------------------------------------
//
// Binary layout: 8-byte magic "BMLDMAT1", little-endian uint64 header length,
// the JSON header, then n*n little-endian float64 in row-major order.

inline constexpr char kDmatMagic[8] = {'B', 'M', 'L', 'D', 'M', 'A', 'T', '1'};

inline void write_dmat_binary(std::ostream& os, const DiscreteBrownianMap& map, std::uint64_t seed) {
    static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
    nlohmann::json header = {{"format", "bml-dmat"},
                             {"version", 1},
                             {"n", map.n},
                             {"seed", seed},
                             {"grid_size", map.grid_times.size()},
                             {"root_index", map.root_index},
                             {"dual_root_index", map.dual_root_index}};
    const std::string text = header.dump();
    const std::uint64_t len = text.size();
    os.write(kDmatMagic, sizeof kDmatMagic);
    os.write(reinterpret_cast<const char*>(&len), sizeof len);
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.write(reinterpret_cast<const char*>(map.dmat.data()), static_cast<std::streamsize>(map.dmat.size() * sizeof(double)));
}

struct DmatFile {
    nlohmann::json header;
    std::size_t n = 0;
    std::vector<double> dmat;
};

inline DmatFile read_dmat_binary(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof magic);
    detail::require(is.good() && std::memcmp(magic, kDmatMagic, sizeof magic) == 0, "not a bml-dmat file");
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof len);
    detail::require(is.good() && len < (1u << 20), "bml-dmat: bad header length");
    std::string text(len, '\0');
    is.read(text.data(), static_cast<std::streamsize>(len));
    DmatFile f;
    f.header = nlohmann::json::parse(text);
    f.n = f.header.at("n").get<std::size_t>();
    f.dmat.resize(f.n * f.n);
    is.read(reinterpret_cast<char*>(f.dmat.data()), static_cast<std::streamsize>(f.dmat.size() * sizeof(double)));
    detail::require(static_cast<std::size_t>(is.gcount()) == f.dmat.size() * sizeof(double), "bml-dmat: truncated data");
    return f;
}

/// CSV rows: index,time,X,Y,dist_to_root.
inline void write_map_csv(std::ostream& os, const DiscreteBrownianMap& map) {
    const auto old = os.precision(17);
    os << "index,time,X,Y,dist_to_root\n";
    for (std::size_t i = 0; i < map.n; ++i)
        os << i << ',' << map.grid_times[i] << ',' << map.x_values[i] << ',' << map.y_values[i] << ','
           << map.distance(map.root_index, i) << '\n';
    os.precision(old);
}

}  // namespace bml
