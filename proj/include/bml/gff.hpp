#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bml/core/errors.hpp"
#include "bml/core/parallel.hpp"
#include "bml/core/rng.hpp"
#include "bml/geodesic.hpp"

namespace bml {

/// Default exponent 1/sqrt(6) of the vertex weights exp(gamma * h).
inline const double kGffGamma = 1.0 / std::sqrt(6.0);

/// Field on an n x n box, row-major: vertex (x, y) has index y * n + x.
struct GffField {
    std::size_t n = 0;
    std::vector<double> values;

    [[nodiscard]] std::size_t index(std::size_t x, std::size_t y) const noexcept { return y * n + x; }
    [[nodiscard]] double at(std::size_t x, std::size_t y) const { return values[index(x, y)]; }
    [[nodiscard]] bool on_frame(std::size_t v) const noexcept {
        const auto x = v % n, y = v / n;
        return x == 0 || y == 0 || x + 1 == n || y + 1 == n;
    }
};

inline void validate(const GffField& f) {
    detail::require(f.n >= 3 && f.values.size() == f.n * f.n, "GffField: bad dimensions");
    for (std::size_t v = 0; v < f.values.size(); ++v) {
        detail::require(std::isfinite(f.values[v]), "GffField: non-finite value");
        detail::require(!f.on_frame(v) || f.values[v] == 0.0, "GffField: frame values must be 0");
    }
}

/// Discrete GFF with zero boundary: covariance is the inverse of the graph
/// Laplacian 4I - A (unit conductances) on the (n-2)^2 interior. Synthesized
/// in the sine eigenbasis: h = S (Z / sqrt(Lambda)) S with
/// S_{xj} = sqrt(2/(m+1)) sin(pi x j / (m+1)), which is symmetric and orthogonal.
inline GffField sample_dgff(std::size_t n, RngStream& rng) {
    detail::require(n >= 3, "sample_dgff: n must be >= 3");
    const std::size_t m = n - 2;
    const double h = std::numbers::pi / static_cast<double>(m + 1);
    std::vector<double> s(m * m), cosv(m);
    const double norm = std::sqrt(2.0 / static_cast<double>(m + 1));
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t j = 0; j < m; ++j)
            s[x * m + j] = norm * std::sin(h * static_cast<double>((x + 1) * (j + 1)));
    for (std::size_t j = 0; j < m; ++j) cosv[j] = std::cos(h * static_cast<double>(j + 1));

    std::vector<double> coef(m * m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            coef[j * m + k] = rng.normal() / std::sqrt(4.0 - 2.0 * cosv[j] - 2.0 * cosv[k]);
    // tmp = S * coef, then out = tmp * S.
    std::vector<double> tmp(m * m, 0.0), out(m * m, 0.0);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t j = 0; j < m; ++j) {
            const double sxj = s[x * m + j];
            for (std::size_t k = 0; k < m; ++k) tmp[x * m + k] += sxj * coef[j * m + k];
        }
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t k = 0; k < m; ++k) {
            const double t = tmp[x * m + k];
            for (std::size_t y = 0; y < m; ++y) out[x * m + y] += t * s[y * m + k];
        }
    GffField f;
    f.n = n;
    f.values.assign(n * n, 0.0);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y) f.values[f.index(x + 1, y + 1)] = out[x * m + y];
    return f;
}

inline bool grid_adjacent(std::size_t n, std::size_t u, std::size_t v) {
    const auto ux = u % n, uy = u / n, vx = v % n, vy = v / n;
    const auto dx = ux > vx ? ux - vx : vx - ux;
    const auto dy = uy > vy ? uy - vy : vy - uy;
    return dx + dy == 1;
}

/// Sum of exp(gamma * h(x)) over the path's vertices, both endpoints included.
inline double path_length(const GffField& field, double gamma, std::span<const std::size_t> path) {
    detail::require(!path.empty(), "path_length: empty path");
    double total = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        detail::require(path[i] < field.values.size(), "path_length: vertex out of range");
        if (i > 0) detail::require(grid_adjacent(field.n, path[i - 1], path[i]), "path_length: non-adjacent step");
        total += std::exp(gamma * field.values[path[i]]);
    }
    return total;
}

/// Vertex-weighted grid as an edge-weighted space: edge (u, v) carries
/// (w_u + w_v) / 2, so a path's edge length plus half the two endpoint
/// weights equals its vertex-weight length.
class GffSpace {
public:
    static constexpr bool exact = false;

    GffSpace(const GffField& field, double gamma) : n_(field.n), w_(field.values.size()) {
        detail::require(field.n >= 2, "GffSpace: field too small");
        for (std::size_t v = 0; v < w_.size(); ++v) w_[v] = std::exp(gamma * field.values[v]);
    }

    [[nodiscard]] std::size_t size() const noexcept { return w_.size(); }
    [[nodiscard]] std::size_t side() const noexcept { return n_; }
    [[nodiscard]] double weight(std::size_t v) const { return w_[v]; }

    template <class F>
    void for_each_neighbor(std::size_t u, F&& f) const {
        const auto x = u % n_, y = u / n_;
        if (x > 0) f(u - 1, 0.5 * (w_[u] + w_[u - 1]));
        if (x + 1 < n_) f(u + 1, 0.5 * (w_[u] + w_[u + 1]));
        if (y > 0) f(u - n_, 0.5 * (w_[u] + w_[u - n_]));
        if (y + 1 < n_) f(u + n_, 0.5 * (w_[u] + w_[u + n_]));
    }

    [[nodiscard]] std::vector<double> distances_from_set(std::span<const std::size_t> sources) const {
        std::vector<double> dist;
        detail::dijkstra(*this, sources, dist, false);
        return dist;
    }

    void update_min_distances(std::size_t center, std::vector<double>& mind) const {
        detail::dijkstra(*this, std::span<const std::size_t>(&center, 1), mind, true);
    }

    /// Vertex-weight length of a geodesic of the edge-weighted space.
    [[nodiscard]] double vertex_length(const GeodesicPath& p) const {
        return p.length() + 0.5 * (w_[p.front()] + w_[p.back()]);
    }

private:
    std::size_t n_;
    std::vector<double> w_;
};

/// Pairs of distinct frame vertices drawn uniformly.
inline std::vector<std::pair<std::size_t, std::size_t>> boundary_pairs(std::size_t n, std::size_t count, RngStream& rng) {
    detail::require(n >= 3, "boundary_pairs: n must be >= 3");
    std::vector<std::size_t> frame;
    for (std::size_t v = 0; v < n * n; ++v) {
        const auto x = v % n, y = v / n;
        if (x == 0 || y == 0 || x + 1 == n || y + 1 == n) frame.push_back(v);
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto a = static_cast<std::size_t>(rng.uniform_index(frame.size()));
        auto b = static_cast<std::size_t>(rng.uniform_index(frame.size() - 1));
        if (b >= a) ++b;
        out.emplace_back(frame[a], frame[b]);
    }
    return out;
}

/// Geodesic bundles for the given pairs; pairs run in parallel.
inline std::vector<GeodesicBundle> gff_geodesic_bundle(const GffField& field, double gamma,
                                                       std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                                       const GeodesicOptions& opt = {}, unsigned threads = 1) {
    validate(field);
    const GffSpace space(field, gamma);
    std::vector<GeodesicBundle> out(pairs.size());
    parallel_for(pairs.size(), threads,
                 [&](std::size_t i) { out[i] = enumerate_geodesics(space, pairs[i].first, pairs[i].second, opt); });
    return out;
}

/// Number of bundle paths through every vertex.
inline std::vector<std::size_t> geodesic_multiplicity(std::size_t vertex_count, std::span<const GeodesicBundle> bundles) {
    std::vector<std::size_t> mult(vertex_count, 0);
    for (const auto& b : bundles)
        for (const auto& p : b.paths)
            for (auto v : p.vertices) ++mult[v];
    return mult;
}

/// Fraction of box vertices lying on at least one computed geodesic.
inline double frame_vertex_fraction(std::size_t vertex_count, std::span<const GeodesicBundle> bundles) {
    const auto mult = geodesic_multiplicity(vertex_count, bundles);
    std::size_t hit = 0;
    for (auto m : mult) hit += m > 0;
    return static_cast<double>(hit) / static_cast<double>(vertex_count);
}

// -----------------------------------------------------------------------------
// Export
// -----------------------------------------------------------------------------

/// CSV grid dump: rows x,y,h.
inline void write_field_csv(std::ostream& os, const GffField& f) {
    const auto old = os.precision(17);
    os << "x,y,h\n";
    for (std::size_t y = 0; y < f.n; ++y)
        for (std::size_t x = 0; x < f.n; ++x) os << x << ',' << y << ',' << f.at(x, y) << '\n';
    os.precision(old);
}

/// Overlay CSV: vertices with positive multiplicity, rows x,y,multiplicity.
inline void write_overlay_csv(std::ostream& os, std::size_t n, std::span<const std::size_t> mult) {
    os << "x,y,multiplicity\n";
    for (std::size_t v = 0; v < mult.size(); ++v)
        if (mult[v] > 0) os << v % n << ',' << v / n << ',' << mult[v] << '\n';
}

/// SVG of the field in grayscale with geodesic vertices drawn in red.
inline void write_overlay_svg(std::ostream& os, const GffField& f, std::span<const std::size_t> mult, std::size_t cell = 4) {
    double lo = 0.0, hi = 0.0;
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    const auto side = f.n * cell;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
       << "\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t y = 0; y < f.n; ++y)
        for (std::size_t x = 0; x < f.n; ++x) {
            const auto v = f.index(x, y);
            const int g = static_cast<int>(std::lround(255.0 * (f.values[v] - lo) / span));
            os << "<rect x=\"" << x * cell << "\" y=\"" << y * cell << "\" width=\"" << cell << "\" height=\"" << cell
               << "\" fill=\"";
            if (mult[v] > 0)
                os << "rgb(220,20,20)";
            else
                os << "rgb(" << g << ',' << g << ',' << g << ')';
            os << "\"/>\n";
        }
    os << "</svg>\n";
}

}  // namespace bml
