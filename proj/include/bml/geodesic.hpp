#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "bml/core/errors.hpp"
#include "bml/core/rng.hpp"
#include "bml/core/stats.hpp"
#include "bml/planar_map.hpp"

namespace bml {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// =============================================================================
// Spaces
// =============================================================================
//
// A space is a finite weighted graph whose shortest-path metric is the metric
// of interest. Every space exposes
//   size(), for_each_neighbor(u, f(v, w)), distances_from_set(sources),
//   update_min_distances(center, mind) and the flag `exact` (integer metric).

template <class S>
concept GeodesicSpace = requires(const S& s, std::size_t u, std::span<const std::size_t> src, std::vector<double>& mind) {
    { s.size() } -> std::convertible_to<std::size_t>;
    { s.distances_from_set(src) } -> std::same_as<std::vector<double>>;
    s.update_min_distances(u, mind);
    s.for_each_neighbor(u, [](std::size_t, double) {});
    { S::exact } -> std::convertible_to<bool>;
};

namespace detail {

/// Multi-source Dijkstra. If `prune` is given, vertices are only settled
/// while their tentative distance improves on prune[v], and prune is lowered
/// in place (incremental nearest-center maintenance).
template <class S>
void dijkstra(const S& space, std::span<const std::size_t> sources, std::vector<double>& dist, bool pruned) {
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    if (!pruned) dist.assign(space.size(), kInf);
    for (auto s : sources) {
        if (pruned && dist[s] <= 0.0) continue;
        dist[s] = 0.0;
        heap.emplace(0.0, s);
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        space.for_each_neighbor(u, [&](std::size_t v, double w) {
            const double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        });
    }
}

}  // namespace detail

/// Unweighted simple graph in CSR form; distances by BFS.
class GraphSpace {
public:
    static constexpr bool exact = true;

    GraphSpace() = default;

    /// Builds from an undirected edge list; self-loops and repeated edges are dropped.
    GraphSpace(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges) : n_(n) {
        std::vector<std::vector<std::uint32_t>> adj(n);
        for (auto [a, b] : edges) {
            detail::require(a < n && b < n, "GraphSpace: edge endpoint out of range");
            if (a == b) continue;
            adj[a].push_back(static_cast<std::uint32_t>(b));
            adj[b].push_back(static_cast<std::uint32_t>(a));
        }
        build(adj);
    }

    explicit GraphSpace(const Quadrangulation& q) : n_(q.n_vertices) {
        std::vector<std::vector<std::uint32_t>> adj(n_);
        for (std::size_t v = 0; v < n_; ++v)
            for (auto w : q.neighbors(v))
                if (static_cast<std::size_t>(w) != v) adj[v].push_back(static_cast<std::uint32_t>(w));
        build(adj);
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t degree(std::size_t u) const { return offsets_[u + 1] - offsets_[u]; }
    [[nodiscard]] std::span<const std::uint32_t> neighbors(std::size_t u) const {
        return {targets_.data() + offsets_[u], degree(u)};
    }

    template <class F>
    void for_each_neighbor(std::size_t u, F&& f) const {
        for (auto v : neighbors(u)) f(static_cast<std::size_t>(v), 1.0);
    }

    [[nodiscard]] std::vector<double> distances_from_set(std::span<const std::size_t> sources) const {
        std::vector<double> dist(n_, kInf);
        std::vector<std::uint32_t> queue;
        queue.reserve(n_);
        for (auto s : sources) {
            detail::require(s < n_, "GraphSpace: source out of range");
            if (dist[s] != 0.0) {
                dist[s] = 0.0;
                queue.push_back(static_cast<std::uint32_t>(s));
            }
        }
        bfs(queue, dist, false);
        return dist;
    }

    [[nodiscard]] std::vector<double> distances_from(std::size_t s) const {
        return distances_from_set(std::span<const std::size_t>(&s, 1));
    }

    void update_min_distances(std::size_t center, std::vector<double>& mind) const {
        if (mind[center] <= 0.0) return;
        mind[center] = 0.0;
        std::vector<std::uint32_t> queue{static_cast<std::uint32_t>(center)};
        bfs(queue, mind, true);
    }

private:
    void build(std::vector<std::vector<std::uint32_t>>& adj) {
        offsets_.assign(n_ + 1, 0);
        for (std::size_t v = 0; v < n_; ++v) {
            std::sort(adj[v].begin(), adj[v].end());
            adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
            offsets_[v + 1] = offsets_[v] + adj[v].size();
        }
        targets_.reserve(offsets_[n_]);
        for (auto& a : adj) targets_.insert(targets_.end(), a.begin(), a.end());
    }

    // Level-synchronous BFS; in pruned mode a vertex is entered only if it
    // strictly improves on the stored value.
    void bfs(std::vector<std::uint32_t>& queue, std::vector<double>& dist, bool pruned) const {
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto u = queue[head];
            const double nd = dist[u] + 1.0;
            for (auto v : neighbors(u))
                if (pruned ? nd < dist[v] : dist[v] == kInf) {
                    dist[v] = nd;
                    queue.push_back(v);
                }
        }
    }

    std::size_t n_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> targets_;
};

/// Finite metric given by a dense distance matrix. The graph structure uses
/// elementary edges: (u, v) is an edge when no third point w, distinct from
/// both at positive distance, satisfies d(u,w) + d(w,v) <= d(u,v) up to a
/// relative tolerance. Geodesics are then maximal refinements.
class DenseMetricSpace {
public:
    static constexpr bool exact = false;

    DenseMetricSpace(std::vector<double> dmat, std::size_t n, double rel_tol = 1e-9)
        : n_(n), d_(std::move(dmat)), adj_(n) {
        detail::require(d_.size() == n * n, "DenseMetricSpace: matrix size mismatch");
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v) {
                const double duv = d_[u * n + v];
                if (!(duv > 0.0)) continue;
                const double tol = rel_tol * duv + 1e-15;
                bool elementary = true;
                const double* ru = d_.data() + u * n;
                const double* rv = d_.data() + v * n;
                for (std::size_t w = 0; w < n && elementary; ++w)
                    if (ru[w] > tol && rv[w] > tol && ru[w] + rv[w] <= duv + tol) elementary = false;
                if (elementary) {
                    adj_[u].emplace_back(v, duv);
                    adj_[v].emplace_back(u, duv);
                }
            }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double distance(std::size_t a, std::size_t b) const { return d_[a * n_ + b]; }

    template <class F>
    void for_each_neighbor(std::size_t u, F&& f) const {
        for (auto [v, w] : adj_[u]) f(v, w);
    }

    [[nodiscard]] std::vector<double> distances_from_set(std::span<const std::size_t> sources) const {
        std::vector<double> dist(n_, kInf);
        for (auto s : sources) {
            detail::require(s < n_, "DenseMetricSpace: source out of range");
            for (std::size_t j = 0; j < n_; ++j) dist[j] = std::min(dist[j], d_[s * n_ + j]);
        }
        return dist;
    }

    [[nodiscard]] std::vector<double> distances_from(std::size_t s) const {
        return distances_from_set(std::span<const std::size_t>(&s, 1));
    }

    void update_min_distances(std::size_t center, std::vector<double>& mind) const {
        for (std::size_t j = 0; j < n_; ++j) mind[j] = std::min(mind[j], d_[center * n_ + j]);
    }

private:
    std::size_t n_;
    std::vector<double> d_;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj_;
};

// =============================================================================
// Geodesic paths and bundles
// =============================================================================

struct GeodesicPath {
    std::vector<std::size_t> vertices;
    std::vector<double> cumlen;

    [[nodiscard]] double length() const { return cumlen.empty() ? 0.0 : cumlen.back(); }
    [[nodiscard]] std::size_t front() const { return vertices.front(); }
    [[nodiscard]] std::size_t back() const { return vertices.back(); }
};

struct NetworkSignature {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t k = 0;
    friend bool operator==(const NetworkSignature&, const NetworkSignature&) = default;
};

struct GeodesicBundle {
    std::pair<std::size_t, std::size_t> endpoints{0, 0};
    double length = 0.0;
    std::vector<GeodesicPath> paths;
    /// More geodesics exist than the enumeration cap.
    bool truncated = false;
    /// Number of geodesics, saturated at cap + 1.
    std::uint64_t total_count = 0;
    /// Filled when the bundle is complete.
    std::optional<NetworkSignature> signature;
    /// (vertex, multiplicity) for branch vertices seen from the far endpoint.
    std::vector<std::pair<std::size_t, std::size_t>> splitting_points;
};

struct GeodesicOptions {
    /// Absolute slack on path length; default 0 for exact spaces and
    /// 1e-9 * d(a,b) otherwise.
    std::optional<double> slack;
    std::size_t cap = 4096;
};

template <GeodesicSpace S>
double default_slack(const S&, double reference_length) {
    return S::exact ? 0.0 : 1e-9 * std::max(reference_length, 1e-300);
}

/// Edges pointing toward `target` along shortest paths.
struct GeodesicDag {
    std::size_t target = 0;
    std::vector<double> dist;
    /// toward[u]: neighbors v with dist[v] + w(u,v) <= dist[u] + slack and dist[v] < dist[u].
    std::vector<std::vector<std::pair<std::size_t, double>>> toward;
};

template <GeodesicSpace S>
GeodesicDag geodesic_dag(const S& space, std::size_t target, std::optional<double> slack = std::nullopt) {
    detail::require(target < space.size(), "geodesic_dag: target out of range");
    GeodesicDag dag;
    dag.target = target;
    dag.dist = space.distances_from_set(std::span<const std::size_t>(&target, 1));
    dag.toward.resize(space.size());
    for (std::size_t u = 0; u < space.size(); ++u) {
        if (dag.dist[u] == kInf) continue;
        const double s = slack.value_or(default_slack(space, dag.dist[u]));
        space.for_each_neighbor(u, [&](std::size_t v, double w) {
            if (dag.dist[v] < dag.dist[u] && dag.dist[v] + w <= dag.dist[u] + s) dag.toward[u].emplace_back(v, w);
        });
    }
    return dag;
}

/// Geodesic from `from` to dag.target that always steps to the lowest-index
/// tight neighbor. Deterministic; used as the canonical representative.
inline GeodesicPath canonical_geodesic(const GeodesicDag& dag, std::size_t from) {
    detail::require(from < dag.dist.size() && dag.dist[from] < kInf, "canonical_geodesic: unreachable start");
    GeodesicPath p;
    p.vertices.push_back(from);
    p.cumlen.push_back(0.0);
    std::size_t u = from;
    while (u != dag.target) {
        const auto& nb = dag.toward[u];
        detail::require(!nb.empty(), "canonical_geodesic: dead end in geodesic DAG");
        auto best = *std::min_element(nb.begin(), nb.end());
        p.vertices.push_back(best.first);
        p.cumlen.push_back(p.cumlen.back() + best.second);
        u = best.first;
    }
    return p;
}

/// Vertices lying on at least one geodesic from a to b, given both distance fields.
inline std::vector<std::size_t> geodesic_region(std::span<const double> da, std::span<const double> db, std::size_t b,
                                                double slack) {
    const double total = da[b];
    std::vector<std::size_t> region;
    for (std::size_t v = 0; v < da.size(); ++v)
        if (da[v] + db[v] <= total + slack) region.push_back(v);
    return region;
}

namespace detail {

// Splitting points seen from v: vertices z (not u, not v) in the union of the
// paths where the set of distinct next vertices toward u has size m > 1;
// multiplicity m - 1.
inline std::vector<std::pair<std::size_t, std::size_t>> splitting_points(const std::vector<GeodesicPath>& paths,
                                                                         std::size_t u, std::size_t v) {
    std::vector<std::pair<std::size_t, std::size_t>> step;  // (z, predecessor toward u)
    for (const auto& p : paths)
        for (std::size_t i = 1; i < p.vertices.size(); ++i) step.emplace_back(p.vertices[i], p.vertices[i - 1]);
    std::sort(step.begin(), step.end());
    step.erase(std::unique(step.begin(), step.end()), step.end());
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < step.size();) {
        std::size_t k = i;
        while (k < step.size() && step[k].first == step[i].first) ++k;
        const std::size_t z = step[i].first;
        if (z != u && z != v && k - i > 1) out.emplace_back(z, k - i - 1);
        i = k;
    }
    return out;
}

}  // namespace detail

/// Signature (I, J, K) of a complete bundle: I distinct first edges at u, J
/// distinct last edges at v, K the total multiplicity of splitting points
/// met when moving from v toward u.
inline NetworkSignature classify_network(const GeodesicBundle& bundle) {
    if (bundle.truncated) throw unclassifiable_error("classify_network: bundle was truncated at the enumeration cap");
    detail::require(!bundle.paths.empty(), "classify_network: empty bundle");
    std::vector<std::size_t> first, last;
    for (const auto& p : bundle.paths) {
        detail::require(p.vertices.size() >= 2, "classify_network: degenerate path");
        first.push_back(p.vertices[1]);
        last.push_back(p.vertices[p.vertices.size() - 2]);
    }
    auto distinct = [](std::vector<std::size_t>& xs) {
        std::sort(xs.begin(), xs.end());
        return static_cast<std::size_t>(std::unique(xs.begin(), xs.end()) - xs.begin());
    };
    NetworkSignature sig;
    sig.i = distinct(first);
    sig.j = distinct(last);
    for (auto [z, mult] : detail::splitting_points(bundle.paths, bundle.endpoints.first, bundle.endpoints.second))
        sig.k += mult;
    return sig;
}

/// All geodesics from a to b: the a -> b paths in the tight-edge DAG
/// {(u,v): d(a,u) + w(u,v) + d(v,b) <= d(a,b) + slack, d(a,v) > d(a,u)}.
template <GeodesicSpace S>
GeodesicBundle enumerate_geodesics(const S& space, std::size_t a, std::size_t b, const GeodesicOptions& opt = {}) {
    detail::require(a < space.size() && b < space.size(), "enumerate_geodesics: endpoint out of range");
    detail::require(a != b, "enumerate_geodesics: endpoints must differ");
    const auto da = space.distances_from_set(std::span<const std::size_t>(&a, 1));
    const auto db = space.distances_from_set(std::span<const std::size_t>(&b, 1));
    detail::require(da[b] < kInf, "enumerate_geodesics: endpoints are disconnected");
    const double total = da[b];
    detail::require(total > 0.0, "enumerate_geodesics: endpoints are at distance zero");
    const double slack = opt.slack.value_or(default_slack(space, total));
    detail::require(slack >= 0.0, "enumerate_geodesics: slack must be nonnegative");

    auto region = geodesic_region(da, db, b, slack);
    std::sort(region.begin(), region.end(), [&](std::size_t x, std::size_t y) { return da[x] < da[y]; });
    std::vector<std::size_t> local(space.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < region.size(); ++i) local[region[i]] = i;
    std::vector<std::vector<std::pair<std::size_t, double>>> succ(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) {
        const auto u = region[i];
        space.for_each_neighbor(u, [&](std::size_t v, double w) {
            if (local[v] == static_cast<std::size_t>(-1)) return;
            if (da[v] > da[u] && da[u] + w + db[v] <= total + slack) succ[i].emplace_back(local[v], w);
        });
        std::sort(succ[i].begin(), succ[i].end());
    }

    // Path counts to b, saturated at cap + 1.
    const std::uint64_t saturate = static_cast<std::uint64_t>(opt.cap) + 1;
    std::vector<std::uint64_t> count(region.size(), 0);
    count[local[b]] = 1;
    for (std::size_t i = region.size(); i-- > 0;) {
        if (region[i] == b) continue;
        std::uint64_t c = 0;
        for (auto [j, w] : succ[i]) c = std::min(saturate, c + count[j]);
        count[i] = c;
    }

    GeodesicBundle bundle;
    bundle.endpoints = {a, b};
    bundle.length = total;
    bundle.total_count = count[local[a]];
    bundle.truncated = bundle.total_count > opt.cap;

    // Depth-first enumeration restricted to nodes that still reach b.
    std::vector<std::size_t> stack_node{local[a]};
    std::vector<std::size_t> stack_edge{0};
    std::vector<double> stack_len{0.0};
    while (!stack_node.empty() && bundle.paths.size() < opt.cap) {
        const auto node = stack_node.back();
        if (region[node] == b) {
            GeodesicPath p;
            for (auto x : stack_node) p.vertices.push_back(region[x]);
            p.cumlen = stack_len;
            bundle.paths.push_back(std::move(p));
            stack_node.pop_back();
            stack_edge.pop_back();
            stack_len.pop_back();
            continue;
        }
        auto& e = stack_edge.back();
        while (e < succ[node].size() && count[succ[node][e].first] == 0) ++e;
        if (e == succ[node].size()) {
            stack_node.pop_back();
            stack_edge.pop_back();
            stack_len.pop_back();
            continue;
        }
        const auto [next, w] = succ[node][e++];
        const double len = stack_len.back() + w;
        stack_node.push_back(next);
        stack_edge.push_back(0);
        stack_len.push_back(len);
    }
    if (!bundle.truncated) {
        bundle.signature = classify_network(bundle);
        bundle.splitting_points = detail::splitting_points(bundle.paths, a, b);
    }
    return bundle;
}

// =============================================================================
// Hausdorff distance, coalescence
// =============================================================================

template <GeodesicSpace S>
double hausdorff_distance(const S& space, std::span<const std::size_t> a, std::span<const std::size_t> b) {
    detail::require(!a.empty() && !b.empty(), "hausdorff_distance: point sets must be nonempty");
    const auto to_b = space.distances_from_set(b);
    const auto to_a = space.distances_from_set(a);
    double h = 0.0;
    for (auto x : a) h = std::max(h, to_b[x]);
    for (auto y : b) h = std::max(h, to_a[y]);
    return h;
}

struct Coalescence {
    std::size_t vertex = 0;
    /// Distance from the coalescence vertex to the root along the paths.
    double distance = 0.0;
};

/// First vertex of the common suffix of two geodesics ending at `root`.
inline Coalescence coalescence_point(std::size_t root, const GeodesicPath& g1, const GeodesicPath& g2) {
    detail::require(!g1.vertices.empty() && !g2.vertices.empty(), "coalescence_point: empty path");
    detail::require(g1.back() == root && g2.back() == root, "coalescence_point: both paths must end at root");
    std::size_t i = g1.vertices.size() - 1, j = g2.vertices.size() - 1;
    while (i > 0 && j > 0 && g1.vertices[i - 1] == g2.vertices[j - 1]) {
        --i;
        --j;
    }
    return {g1.vertices[i], g1.length() - g1.cumlen[i]};
}

// =============================================================================
// k-star census
// =============================================================================

struct StarReport {
    std::size_t center = 0;
    /// Number of pairwise disjoint geodesic segments found (capped at the requested k).
    std::size_t k = 0;
    std::size_t requested_k = 0;
    std::vector<GeodesicPath> witnesses;
    double disjoint_radius = 0.0;
    /// Radius exceeded the eccentricity of the center; nothing was computed.
    bool skipped = false;
};

namespace detail {

// Unit-capacity max flow (Edmonds-Karp on a small residual graph).
class UnitFlow {
public:
    explicit UnitFlow(std::size_t n) : head_(n, -1) {}
    void add_edge(std::size_t u, std::size_t v) {
        edges_.push_back({v, 1, head_[u]});
        head_[u] = static_cast<long>(edges_.size() - 1);
        edges_.push_back({u, 0, head_[v]});
        head_[v] = static_cast<long>(edges_.size() - 1);
    }
    std::size_t run(std::size_t s, std::size_t t, std::size_t limit) {
        std::size_t flow = 0;
        std::vector<long> via(head_.size());
        while (flow < limit) {
            std::fill(via.begin(), via.end(), -2);
            via[s] = -1;
            std::vector<std::size_t> queue{s};
            for (std::size_t q = 0; q < queue.size() && via[t] == -2; ++q)
                for (long e = head_[queue[q]]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next) {
                    const auto& ed = edges_[static_cast<std::size_t>(e)];
                    if (ed.cap > 0 && via[ed.to] == -2) {
                        via[ed.to] = e;
                        queue.push_back(ed.to);
                    }
                }
            if (via[t] == -2) break;
            for (auto v = t; v != s;) {
                const auto e = static_cast<std::size_t>(via[v]);
                edges_[e].cap -= 1;
                edges_[e ^ 1].cap += 1;
                v = edges_[e ^ 1].to;
            }
            ++flow;
        }
        return flow;
    }
    // Saturated forward edges leaving u.
    [[nodiscard]] std::vector<std::size_t> used_from(std::size_t u) const {
        std::vector<std::size_t> out;
        for (long e = head_[u]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next)
            if (!(e & 1) && edges_[static_cast<std::size_t>(e)].cap == 0) out.push_back(edges_[static_cast<std::size_t>(e)].to);
        return out;
    }

private:
    struct Edge {
        std::size_t to;
        int cap;
        long next;
    };
    std::vector<long> head_;
    std::vector<Edge> edges_;
};

}  // namespace detail

/// Largest number m <= k of geodesic segments from `center` to the sphere of
/// the given radius that are pairwise disjoint away from the center, with
/// witnesses. Computed exactly as a vertex-disjoint max flow on the outward
/// geodesic DAG.
template <GeodesicSpace S>
StarReport star_at(const S& space, std::size_t center, std::size_t k, double radius) {
    detail::require(k >= 2, "star_census: k must be >= 2");
    detail::require(radius > 0.0, "star_census: radius must be positive");
    StarReport rep;
    rep.center = center;
    rep.requested_k = k;
    rep.disjoint_radius = radius;
    const auto dz = space.distances_from_set(std::span<const std::size_t>(&center, 1));
    double ecc = 0.0;
    for (double d : dz)
        if (d < kInf) ecc = std::max(ecc, d);
    if (radius > ecc) {
        rep.skipped = true;
        return rep;
    }
    const double slack = default_slack(space, radius);
    // Ball vertices (d < radius) plus exits (first vertices at d >= radius).
    std::vector<std::size_t> local(space.size(), static_cast<std::size_t>(-1));
    std::vector<std::size_t> nodes;
    for (std::size_t v = 0; v < space.size(); ++v)
        if (dz[v] < radius - slack) {
            local[v] = nodes.size();
            nodes.push_back(v);
        }
    std::vector<std::size_t> exits;
    for (auto u : std::vector<std::size_t>(nodes))
        space.for_each_neighbor(u, [&](std::size_t v, double w) {
            if (local[v] == static_cast<std::size_t>(-1) && dz[v] >= radius - slack && dz[u] + w <= dz[v] + slack) {
                local[v] = nodes.size();
                nodes.push_back(v);
                exits.push_back(v);
            }
        });
    // Split every node: in = 2i, out = 2i + 1; sink = 2N.
    const std::size_t nn = nodes.size();
    const std::size_t sink = 2 * nn;
    detail::UnitFlow flow(2 * nn + 1);
    for (std::size_t i = 0; i < nn; ++i) {
        if (nodes[i] != center) flow.add_edge(2 * i, 2 * i + 1);
        if (dz[nodes[i]] >= radius - slack) {
            flow.add_edge(2 * i + 1, sink);
            continue;
        }
        space.for_each_neighbor(nodes[i], [&](std::size_t v, double w) {
            const auto j = local[v];
            if (j == static_cast<std::size_t>(-1)) return;
            if (dz[v] > dz[nodes[i]] && dz[nodes[i]] + w <= dz[v] + slack) flow.add_edge(2 * i + 1, 2 * j);
        });
    }
    const std::size_t src = local[center];
    rep.k = flow.run(2 * src + 1, sink, k);
    // Decompose the flow into witness paths.
    auto starts = flow.used_from(2 * src + 1);
    for (auto in_node : starts) {
        GeodesicPath p;
        p.vertices.push_back(center);
        p.cumlen.push_back(0.0);
        std::size_t cur = in_node / 2;
        while (true) {
            p.vertices.push_back(nodes[cur]);
            p.cumlen.push_back(dz[nodes[cur]]);
            const auto nxt = flow.used_from(2 * cur + 1);
            if (nxt.empty() || nxt.front() == sink) break;
            cur = nxt.front() / 2;
        }
        rep.witnesses.push_back(std::move(p));
    }
    return rep;
}

/// star_at over `sample_centers` uniformly drawn centers.
template <GeodesicSpace S>
std::vector<StarReport> star_census(const S& space, std::size_t k, double radius, std::size_t sample_centers,
                                    RngStream& rng) {
    detail::require(k >= 2, "star_census: k must be >= 2");
    detail::require(radius > 0.0, "star_census: radius must be positive");
    std::vector<StarReport> out;
    out.reserve(sample_centers);
    for (std::size_t i = 0; i < sample_centers; ++i)
        out.push_back(star_at(space, static_cast<std::size_t>(rng.uniform_index(space.size())), k, radius));
    return out;
}

// =============================================================================
// Box counting
// =============================================================================

/// Greedy farthest-point covering counts: counts[s] is the number of centers
/// (chosen from `points`, in farthest-point order) after which every point
/// lies within scales[s] of some center.
template <GeodesicSpace S>
std::vector<std::size_t> covering_counts(const S& space, std::span<const std::size_t> points, std::span<const double> scales) {
    detail::require(!points.empty(), "covering_counts: empty point set");
    std::vector<double> mind(space.size(), kInf);
    std::vector<std::size_t> counts(scales.size(), 0);
    const double smallest = *std::min_element(scales.begin(), scales.end());
    std::size_t center = points.front();
    std::size_t used = 0;
    while (true) {
        space.update_min_distances(center, mind);
        ++used;
        double radius = 0.0;
        for (auto p : points)
            if (mind[p] > radius) {
                radius = mind[p];
                center = p;
            }
        for (std::size_t s = 0; s < scales.size(); ++s)
            if (counts[s] == 0 && radius <= scales[s]) counts[s] = used;
        if (radius <= smallest) break;
    }
    return counts;
}

struct BoxDimension {
    double slope = 0.0;
    double stderr_slope = 0.0;
    std::vector<double> scales;
    std::vector<std::size_t> counts;
    std::size_t point_count = 0;
};

inline void validate_scales(std::span<const double> scales) {
    detail::require(scales.size() >= 3, "box dimension: need at least 3 scales");
    for (double s : scales) detail::require(s > 0.0 && std::isfinite(s), "box dimension: scales must be positive");
    const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
    detail::require(*hi >= 10.0 * *lo, "box dimension: scales must span at least one decade");
}

/// Least-squares slope of log N(eps) against log(1/eps) for a point set.
template <GeodesicSpace S>
BoxDimension box_counting_dimension(const S& space, std::span<const std::size_t> points, std::span<const double> scales) {
    validate_scales(scales);
    BoxDimension out;
    out.scales.assign(scales.begin(), scales.end());
    out.counts = covering_counts(space, points, scales);
    out.point_count = points.size();
    std::vector<double> x, y;
    for (std::size_t s = 0; s < scales.size(); ++s) {
        x.push_back(std::log(1.0 / scales[s]));
        y.push_back(std::log(static_cast<double>(out.counts[s])));
    }
    const auto fit = stats::least_squares(x, y);
    out.slope = fit.slope;
    out.stderr_slope = fit.slope_stderr;
    return out;
}

enum class FrameMode {
    /// One canonical geodesic per pair. Typical pairs of the continuum have a
    /// unique geodesic, so lattice ties are not counted.
    canonical,
    /// Every vertex on some geodesic between the pair.
    all_geodesics,
};

/// Geodesic frame of sampled pairs: vertices on the pair geodesics, minus
/// the pair endpoints.
template <GeodesicSpace S>
std::vector<std::size_t> sampled_geodesic_frame(const S& space, std::size_t pair_count, RngStream& rng,
                                                FrameMode mode = FrameMode::canonical) {
    detail::require(space.size() >= 2, "geodesic frame: space needs at least 2 points");
    std::vector<char> on_frame(space.size(), 0), endpoint(space.size(), 0);
    for (std::size_t p = 0; p < pair_count; ++p) {
        const auto a = static_cast<std::size_t>(rng.uniform_index(space.size()));
        auto b = static_cast<std::size_t>(rng.uniform_index(space.size() - 1));
        if (b >= a) ++b;
        endpoint[a] = endpoint[b] = 1;
        if (mode == FrameMode::canonical) {
            for (auto v : canonical_geodesic(geodesic_dag(space, b), a).vertices) on_frame[v] = 1;
            continue;
        }
        const auto da = space.distances_from_set(std::span<const std::size_t>(&a, 1));
        const auto db = space.distances_from_set(std::span<const std::size_t>(&b, 1));
        for (auto v : geodesic_region(da, db, b, default_slack(space, da[b]))) on_frame[v] = 1;
    }
    std::vector<std::size_t> frame;
    for (std::size_t v = 0; v < space.size(); ++v)
        if (on_frame[v] && !endpoint[v]) frame.push_back(v);
    return frame;
}

template <GeodesicSpace S>
BoxDimension frame_box_dimension(const S& space, std::size_t pair_count, std::span<const double> scales, RngStream& rng,
                                 FrameMode mode = FrameMode::canonical) {
    validate_scales(scales);
    detail::require(pair_count >= 1, "frame_box_dimension: need at least one pair");
    const auto frame = sampled_geodesic_frame(space, pair_count, rng, mode);
    detail::require(!frame.empty(), "frame_box_dimension: sampled frame is empty");
    return box_counting_dimension(space, frame, scales);
}

// =============================================================================
// Strong confluence
// =============================================================================

/// Length of the largest end-segments of g1 and g2 not contained in the other
/// path; the maximum over the four ends.
inline double overlap_deficit(const GeodesicPath& g1, const GeodesicPath& g2) {
    auto ends = [](const GeodesicPath& p, const GeodesicPath& other) {
        std::vector<std::size_t> s(other.vertices);
        std::sort(s.begin(), s.end());
        std::size_t first = p.vertices.size(), last = p.vertices.size();
        for (std::size_t i = 0; i < p.vertices.size(); ++i)
            if (std::binary_search(s.begin(), s.end(), p.vertices[i])) {
                if (first == p.vertices.size()) first = i;
                last = i;
            }
        if (first == p.vertices.size()) return p.length();
        return std::max(p.cumlen[first], p.length() - p.cumlen[last]);
    };
    return std::max(ends(g1, g2), ends(g2, g1));
}

struct ConfluenceRow {
    double epsilon = 0.0;
    std::size_t pairs = 0;
    double mean_deficit = 0.0;
    double stderr_deficit = 0.0;
    bool empty = true;
};

struct ConfluenceSample {
    double hausdorff = 0.0;
    double deficit = 0.0;
};

struct ConfluenceTable {
    std::vector<ConfluenceRow> rows;
    std::vector<ConfluenceSample> samples;
    /// Weighted PAVA violation mass of the mean deficits across rows.
    double violation_mass = 0.0;
};

struct ConfluenceOptions {
    std::size_t pairs = 400;
    std::size_t min_points = 1000;
};

/// Samples pairs of canonical geodesics a->b and a2->b2 with a2, b2 drawn at
/// random distances up to max(epsilon_list) from a, b, and tabulates the mean
/// overlap deficit over pairs with Hausdorff distance <= eps.
template <GeodesicSpace S>
ConfluenceTable strong_confluence_statistic(const S& space, std::span<const double> epsilon_list, RngStream& rng,
                                            const ConfluenceOptions& opt = {}) {
    detail::require(space.size() >= opt.min_points, "strong_confluence_statistic: space is too small");
    detail::require(!epsilon_list.empty(), "strong_confluence_statistic: empty epsilon list");
    std::vector<double> eps(epsilon_list.begin(), epsilon_list.end());
    std::sort(eps.begin(), eps.end());
    const double reach = eps.back();
    auto near = [&](const std::vector<double>& d) {
        const double r = reach * rng.uniform();
        std::vector<std::size_t> cand;
        for (std::size_t v = 0; v < d.size(); ++v)
            if (d[v] <= r) cand.push_back(v);
        return cand[static_cast<std::size_t>(rng.uniform_index(cand.size()))];
    };
    ConfluenceTable table;
    for (std::size_t p = 0; p < opt.pairs; ++p) {
        const auto a = static_cast<std::size_t>(rng.uniform_index(space.size()));
        auto b = static_cast<std::size_t>(rng.uniform_index(space.size() - 1));
        if (b >= a) ++b;
        const auto da = space.distances_from_set(std::span<const std::size_t>(&a, 1));
        const auto a2 = near(da);
        const auto dag_b = geodesic_dag(space, b);
        const auto b2 = near(dag_b.dist);
        if (a2 == b2) continue;
        const auto g1 = canonical_geodesic(dag_b, a);
        const auto g2 = b2 == b ? canonical_geodesic(dag_b, a2) : canonical_geodesic(geodesic_dag(space, b2), a2);
        const double h = hausdorff_distance(space, g1.vertices, g2.vertices);
        table.samples.push_back({h, overlap_deficit(g1, g2)});
    }
    std::vector<double> means, weights;
    for (double e : eps) {
        stats::Accumulator acc;
        for (const auto& s : table.samples)
            if (s.hausdorff <= e) acc.add(s.deficit);
        ConfluenceRow row;
        row.epsilon = e;
        row.pairs = acc.count();
        row.empty = acc.count() == 0;
        row.mean_deficit = acc.mean();
        row.stderr_deficit = acc.stderr_mean();
        table.rows.push_back(row);
        if (!row.empty) {
            means.push_back(row.mean_deficit);
            weights.push_back(static_cast<double>(row.pairs));
        }
    }
    table.violation_mass = means.empty() ? 0.0 : stats::monotone_violation_mass(means, weights);
    return table;
}

}  // namespace bml
