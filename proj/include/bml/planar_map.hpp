#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bml/core/errors.hpp"
#include "bml/core/rng.hpp"

namespace bml {

// =============================================================================
// Labeled plane trees
// =============================================================================

/// Plane tree given by its contour (Dyck path of +1/-1 steps) with integer
/// labels. Vertex 0 is the root; vertex k > 0 is the k-th vertex discovered
/// by the contour (the endpoint of the k-th up-step).
struct LabeledPlaneTree {
    std::size_t n_edges = 0;
    std::vector<std::int8_t> contour;
    std::vector<std::int32_t> labels;

    [[nodiscard]] std::size_t n_vertices() const noexcept { return n_edges + 1; }
};

/// Vertex visited at each contour time 0..2n-1 (the corner sequence).
inline std::vector<std::int32_t> contour_vertices(const LabeledPlaneTree& tree) {
    std::vector<std::int32_t> corner(2 * tree.n_edges);
    std::vector<std::int32_t> stack{0};
    std::int32_t next_vertex = 1;
    for (std::size_t i = 0; i < corner.size(); ++i) {
        corner[i] = stack.back();
        if (tree.contour[i] > 0)
            stack.push_back(next_vertex++);
        else
            stack.pop_back();
    }
    return corner;
}

/// Parent of every vertex (-1 for the root).
inline std::vector<std::int32_t> tree_parents(const LabeledPlaneTree& tree) {
    std::vector<std::int32_t> parent(tree.n_vertices(), -1);
    std::vector<std::int32_t> stack{0};
    std::int32_t next_vertex = 1;
    for (auto step : tree.contour) {
        if (step > 0) {
            parent[static_cast<std::size_t>(next_vertex)] = stack.back();
            stack.push_back(next_vertex++);
        } else {
            stack.pop_back();
        }
    }
    return parent;
}

inline void validate(const LabeledPlaneTree& tree) {
    detail::require(tree.n_edges >= 1, "tree must have at least one edge");
    detail::require(tree.contour.size() == 2 * tree.n_edges, "contour length must be 2n");
    detail::require(tree.labels.size() == tree.n_vertices(), "need one label per vertex");
    long height = 0;
    for (auto step : tree.contour) {
        detail::require(step == 1 || step == -1, "contour steps must be +-1");
        height += step;
        detail::require(height >= 0, "contour must stay nonnegative");
    }
    detail::require(height == 0, "contour must return to 0");
    detail::require(tree.labels[0] == 0, "root label must be 0");
    const auto parent = tree_parents(tree);
    for (std::size_t v = 1; v < parent.size(); ++v) {
        const auto diff = tree.labels[v] - tree.labels[static_cast<std::size_t>(parent[v])];
        detail::require(diff >= -1 && diff <= 1, "labels must change by at most 1 along edges");
    }
}

/// Uniform plane tree with n edges and i.i.d. uniform {-1,0,+1} label
/// increments. The contour comes from the cycle lemma: a uniform arrangement
/// of n up-steps and n+1 down-steps has exactly one rotation whose partial
/// sums stay >= 0 until the final -1; dropping that step gives a uniform
/// Dyck path.
inline LabeledPlaneTree sample_labeled_tree(std::size_t n_edges, RngStream& rng) {
    detail::require(n_edges >= 1, "sample_labeled_tree: n_edges must be >= 1");
    const std::size_t len = 2 * n_edges + 1;
    std::vector<std::int8_t> steps(len, -1);
    std::fill(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(n_edges), std::int8_t{1});
    for (std::size_t i = len - 1; i > 0; --i)
        std::swap(steps[i], steps[static_cast<std::size_t>(rng.uniform_index(i + 1))]);
    long sum = 0, best = 0;
    std::size_t start = 0;  // rotation starts after the first minimum of partial sums
    for (std::size_t i = 0; i < len; ++i) {
        sum += steps[i];
        if (sum < best) {
            best = sum;
            start = i + 1;
        }
    }
    LabeledPlaneTree tree;
    tree.n_edges = n_edges;
    tree.contour.resize(2 * n_edges);
    for (std::size_t i = 0; i < 2 * n_edges; ++i) tree.contour[i] = steps[(start + i) % len];
    tree.labels.assign(tree.n_vertices(), 0);
    const auto parent = tree_parents(tree);
    for (std::size_t v = 1; v < tree.labels.size(); ++v)
        tree.labels[v] = tree.labels[static_cast<std::size_t>(parent[v])] +
                         static_cast<std::int32_t>(rng.uniform_index(3)) - 1;
    return tree;
}

// =============================================================================
// Quadrangulations
// =============================================================================

/// Rooted pointed planar map as half-edge tables. Half-edge h leaves
/// vertex[h]; opposite[h] is its twin; next[h] is the following half-edge
/// along the face to its left. Adjacency is cached in CSR form for BFS.
struct Quadrangulation {
    std::vector<std::int32_t> next;
    std::vector<std::int32_t> opposite;
    std::vector<std::int32_t> vertex;
    std::int32_t root_half_edge = 0;
    std::int32_t pointed_vertex = 0;
    std::size_t n_faces = 0;
    std::size_t n_vertices = 0;
    std::vector<std::int32_t> adj_offsets;
    std::vector<std::int32_t> adj_targets;

    [[nodiscard]] std::size_t n_half_edges() const noexcept { return next.size(); }
    [[nodiscard]] std::size_t n_edges() const noexcept { return next.size() / 2; }
    [[nodiscard]] std::span<const std::int32_t> neighbors(std::size_t v) const {
        return {adj_targets.data() + adj_offsets[v],
                static_cast<std::size_t>(adj_offsets[v + 1] - adj_offsets[v])};
    }
    [[nodiscard]] std::size_t degree(std::size_t v) const {
        return static_cast<std::size_t>(adj_offsets[v + 1] - adj_offsets[v]);
    }

    /// Rebuilds the CSR adjacency from the half-edge tables.
    void rebuild_adjacency() {
        adj_offsets.assign(n_vertices + 1, 0);
        for (auto v : vertex) ++adj_offsets[static_cast<std::size_t>(v) + 1];
        for (std::size_t v = 0; v < n_vertices; ++v) adj_offsets[v + 1] += adj_offsets[v];
        adj_targets.assign(vertex.size(), 0);
        auto fill = adj_offsets;
        for (std::size_t h = 0; h < vertex.size(); ++h)
            adj_targets[static_cast<std::size_t>(fill[static_cast<std::size_t>(vertex[h])]++)] =
                vertex[static_cast<std::size_t>(opposite[h])];
    }
};

/// Number of face cycles of the `next` permutation and the length of each.
inline std::vector<std::size_t> face_degrees(const Quadrangulation& q) {
    std::vector<char> seen(q.next.size(), 0);
    std::vector<std::size_t> degrees;
    for (std::size_t h = 0; h < q.next.size(); ++h) {
        if (seen[h]) continue;
        std::size_t len = 0;
        for (auto g = h; !seen[g]; g = static_cast<std::size_t>(q.next[g])) {
            seen[g] = 1;
            ++len;
        }
        degrees.push_back(len);
    }
    return degrees;
}

/// Structural checks: twin involution without fixed points, `next` a
/// permutation, every face of degree 4, Euler's formula, connectivity.
inline void validate(const Quadrangulation& q) {
    const std::size_t m = q.next.size();
    detail::require(m > 0 && m % 2 == 0, "quadrangulation: half-edge count must be even and positive");
    detail::require(q.opposite.size() == m && q.vertex.size() == m, "quadrangulation: table sizes differ");
    std::vector<char> hit(m, 0);
    for (std::size_t h = 0; h < m; ++h) {
        const auto o = q.opposite[h];
        detail::require(o >= 0 && static_cast<std::size_t>(o) < m && static_cast<std::size_t>(o) != h &&
                            static_cast<std::size_t>(q.opposite[static_cast<std::size_t>(o)]) == h,
                        "quadrangulation: opposite must be a fixed-point-free involution");
        const auto nx = q.next[h];
        detail::require(nx >= 0 && static_cast<std::size_t>(nx) < m && !hit[static_cast<std::size_t>(nx)],
                        "quadrangulation: next must be a permutation");
        hit[static_cast<std::size_t>(nx)] = 1;
        detail::require(q.vertex[static_cast<std::size_t>(nx)] == q.vertex[static_cast<std::size_t>(o)],
                        "quadrangulation: next must leave the head of the current half-edge");
    }
    const auto faces = face_degrees(q);
    for (auto d : faces) detail::require(d == 4, "quadrangulation: every face must have degree 4");
    detail::require(faces.size() == q.n_faces, "quadrangulation: face count mismatch");
    const long euler = static_cast<long>(q.n_vertices) - static_cast<long>(m / 2) + static_cast<long>(faces.size());
    detail::require(euler == 2, "quadrangulation: Euler characteristic must be 2");
    detail::require(q.n_vertices == q.n_faces + 2, "quadrangulation: vertex count must be n + 2");
    // connectivity
    std::vector<char> reached(q.n_vertices, 0);
    std::vector<std::int32_t> queue{0};
    reached[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
        for (auto w : q.neighbors(static_cast<std::size_t>(queue[head])))
            if (!reached[static_cast<std::size_t>(w)]) {
                reached[static_cast<std::size_t>(w)] = 1;
                queue.push_back(w);
            }
    detail::require(queue.size() == q.n_vertices, "quadrangulation: map must be connected");
}

/// Cori-Vauquelin-Schaeffer construction of a rooted pointed quadrangulation.
///
/// Every contour corner is joined to its successor, the next corner in cyclic
/// contour order carrying label one less; corners of minimal label are joined
/// to an extra vertex (index n+1, the pointed vertex). Tree edges are then
/// erased. Tree vertex k keeps index k. The root half-edge is the arc from
/// corner 0, leaving the root vertex when sign = +1 and entering it when
/// sign = -1.
inline Quadrangulation cvs_construct(const LabeledPlaneTree& tree, int sign) {
    validate(tree);
    detail::require(sign == 1 || sign == -1, "cvs_construct: sign must be +1 or -1");
    const std::size_t n = tree.n_edges;
    const std::size_t corners = 2 * n;
    const auto corner_vertex = contour_vertices(tree);
    std::vector<std::int32_t> lab(corners);
    for (std::size_t i = 0; i < corners; ++i) lab[i] = tree.labels[static_cast<std::size_t>(corner_vertex[i])];
    const std::int32_t lmin = *std::min_element(lab.begin(), lab.end());
    const std::int32_t lmax = *std::max_element(lab.begin(), lab.end());
    const auto pointed = static_cast<std::int32_t>(n + 1);

    // successor[i] = corner index, or -1 for the pointed vertex.
    std::vector<std::int64_t> successor(corners, -1);
    {
        std::vector<std::int64_t> next_seen(static_cast<std::size_t>(lmax - lmin + 2), -1);
        for (std::size_t k = 2 * corners; k-- > 0;) {
            const std::size_t i = k % corners;
            const auto l = static_cast<std::size_t>(lab[i] - lmin);
            if (k < corners && lab[i] > lmin) {
                const auto pos = next_seen[l - 1];
                if (pos >= 0 && pos < static_cast<std::int64_t>(k + corners))
                    successor[i] = pos % static_cast<std::int64_t>(corners);
            }
            next_seen[l] = static_cast<std::int64_t>(k);
        }
    }

    // Arc k (from corner k) has half-edges 2k (at corner k) and 2k+1 (at the target).
    Quadrangulation q;
    q.n_faces = n;
    q.n_vertices = n + 2;
    q.pointed_vertex = pointed;
    const std::size_t m = 2 * corners;
    q.opposite.resize(m);
    q.vertex.resize(m);
    for (std::size_t k = 0; k < corners; ++k) {
        q.opposite[2 * k] = static_cast<std::int32_t>(2 * k + 1);
        q.opposite[2 * k + 1] = static_cast<std::int32_t>(2 * k);
        q.vertex[2 * k] = corner_vertex[k];
        q.vertex[2 * k + 1] = successor[k] >= 0 ? corner_vertex[static_cast<std::size_t>(successor[k])] : pointed;
    }

    // Rotation system. Inside a corner slot the incoming arcs come first, the
    // most recent source corner first, followed by the corner's own outgoing
    // arc. Slots follow contour order around each tree vertex. Around the
    // pointed vertex the arcs appear in decreasing corner order.
    std::vector<std::vector<std::int32_t>> incoming(corners);
    for (std::size_t k = 0; k < corners; ++k)
        if (successor[k] >= 0) incoming[static_cast<std::size_t>(successor[k])].push_back(static_cast<std::int32_t>(k));
    std::vector<std::vector<std::int32_t>> rotation(q.n_vertices);
    for (std::size_t j = 0; j < corners; ++j) {
        auto& in = incoming[j];
        // backward cyclic distance (j - i) mod corners, ascending
        std::sort(in.begin(), in.end(), [&](std::int32_t a, std::int32_t b) {
            const auto da = (static_cast<std::int64_t>(j) - a + static_cast<std::int64_t>(corners)) % static_cast<std::int64_t>(corners);
            const auto db = (static_cast<std::int64_t>(j) - b + static_cast<std::int64_t>(corners)) % static_cast<std::int64_t>(corners);
            return da < db;
        });
        auto& rot = rotation[static_cast<std::size_t>(corner_vertex[j])];
        for (auto i : in) rot.push_back(2 * i + 1);
        rot.push_back(static_cast<std::int32_t>(2 * j));
    }
    for (std::size_t k = corners; k-- > 0;)
        if (successor[k] < 0) rotation[static_cast<std::size_t>(pointed)].push_back(static_cast<std::int32_t>(2 * k + 1));

    std::vector<std::int32_t> sigma(m);
    for (const auto& rot : rotation)
        for (std::size_t p = 0; p < rot.size(); ++p) sigma[static_cast<std::size_t>(rot[p])] = rot[(p + 1) % rot.size()];
    q.next.resize(m);
    for (std::size_t h = 0; h < m; ++h) q.next[h] = sigma[static_cast<std::size_t>(q.opposite[h])];
    q.root_half_edge = sign > 0 ? 0 : 1;
    q.rebuild_adjacency();
    return q;
}

/// Canonical code of a rooted map: half-edges relabeled in the order a
/// breadth-first traversal from the root reaches them through `next` and
/// `opposite`. Two rooted maps are isomorphic iff their codes agree. When
/// `pointed` is set the code also records the pointed vertex.
inline std::vector<std::int32_t> canonical_code(const Quadrangulation& q, bool pointed = true) {
    const std::size_t m = q.next.size();
    std::vector<std::int32_t> label(m, -1);
    std::vector<std::int32_t> order;
    order.reserve(m);
    label[static_cast<std::size_t>(q.root_half_edge)] = 0;
    order.push_back(q.root_half_edge);
    for (std::size_t head = 0; head < order.size(); ++head) {
        const auto h = static_cast<std::size_t>(order[head]);
        for (auto g : {q.next[h], q.opposite[h]})
            if (label[static_cast<std::size_t>(g)] < 0) {
                label[static_cast<std::size_t>(g)] = static_cast<std::int32_t>(order.size());
                order.push_back(g);
            }
    }
    std::vector<std::int32_t> code;
    code.reserve(2 * m + 1);
    for (auto h : order) {
        code.push_back(label[static_cast<std::size_t>(q.next[static_cast<std::size_t>(h)])]);
        code.push_back(label[static_cast<std::size_t>(q.opposite[static_cast<std::size_t>(h)])]);
    }
    if (pointed) {
        std::int32_t best = std::numeric_limits<std::int32_t>::max();
        for (std::size_t h = 0; h < m; ++h)
            if (q.vertex[h] == q.pointed_vertex) best = std::min(best, label[h]);
        code.push_back(best);
    }
    return code;
}

// =============================================================================
// Graph metric, filled balls, hulls
// =============================================================================

inline constexpr std::int32_t kUnreached = -1;

/// Exact BFS distances from `source` (kUnreached for other components).
inline std::vector<std::int32_t> bfs_metric(const Quadrangulation& q, std::size_t source) {
    detail::require(source < q.n_vertices, "bfs_metric: source out of range");
    std::vector<std::int32_t> dist(q.n_vertices, kUnreached);
    std::vector<std::int32_t> queue;
    queue.reserve(q.n_vertices);
    dist[source] = 0;
    queue.push_back(static_cast<std::int32_t>(source));
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto u = static_cast<std::size_t>(queue[head]);
        for (auto w : q.neighbors(u))
            if (dist[static_cast<std::size_t>(w)] == kUnreached) {
                dist[static_cast<std::size_t>(w)] = dist[u] + 1;
                queue.push_back(w);
            }
    }
    return dist;
}

struct FilledBall {
    std::size_t center = 0;
    std::size_t basepoint = 0;
    std::int32_t radius = 0;
    std::vector<std::int32_t> vertex_set;  // sorted
    std::size_t boundary_length = 0;
};

/// Complement of the basepoint component of {v : d(center, v) > radius}.
/// boundary_length counts edges (with multiplicity) between the hull and
/// that component. `center_dist` must be bfs_metric(q, center).
inline FilledBall filled_ball(const Quadrangulation& q, std::size_t center, std::size_t basepoint, std::int32_t radius,
                              const std::vector<std::int32_t>& center_dist) {
    detail::require(center < q.n_vertices && basepoint < q.n_vertices, "filled_ball: vertex out of range");
    detail::require(center_dist.size() == q.n_vertices, "filled_ball: distance vector size mismatch");
    detail::require(radius >= 1, "filled_ball: radius must be >= 1");
    detail::require(radius < center_dist[basepoint], "filled_ball: radius must be below d(center, basepoint)");
    std::vector<char> outside(q.n_vertices, 0);
    std::vector<std::int32_t> queue{static_cast<std::int32_t>(basepoint)};
    outside[basepoint] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
        for (auto w : q.neighbors(static_cast<std::size_t>(queue[head]))) {
            const auto wi = static_cast<std::size_t>(w);
            if (!outside[wi] && center_dist[wi] > radius) {
                outside[wi] = 1;
                queue.push_back(w);
            }
        }
    FilledBall fb;
    fb.center = center;
    fb.basepoint = basepoint;
    fb.radius = radius;
    for (std::size_t v = 0; v < q.n_vertices; ++v)
        if (!outside[v]) fb.vertex_set.push_back(static_cast<std::int32_t>(v));
    for (auto v : queue)
        for (auto w : q.neighbors(static_cast<std::size_t>(v)))
            if (!outside[static_cast<std::size_t>(w)]) ++fb.boundary_length;
    return fb;
}

inline FilledBall filled_ball(const Quadrangulation& q, std::size_t center, std::size_t basepoint, std::int32_t radius) {
    return filled_ball(q, center, basepoint, radius, bfs_metric(q, center));
}

/// Hull boundary lengths L_r for r = 1 .. d(center, basepoint) - 1.
inline std::vector<std::size_t> boundary_length_process(const Quadrangulation& q, std::size_t center,
                                                        std::size_t basepoint) {
    const auto dist = bfs_metric(q, center);
    detail::require(basepoint < q.n_vertices, "boundary_length_process: basepoint out of range");
    const auto d = dist[basepoint];
    detail::require(d >= 2, "boundary_length_process: need d(center, basepoint) >= 2");
    std::vector<std::size_t> lengths;
    lengths.reserve(static_cast<std::size_t>(d - 1));
    for (std::int32_t r = 1; r < d; ++r) lengths.push_back(filled_ball(q, center, basepoint, r, dist).boundary_length);
    return lengths;
}

// =============================================================================
// Sampling and calibration
// =============================================================================

/// Uniform rooted pointed quadrangulation with n faces.
inline Quadrangulation sample_quadrangulation(std::size_t n_faces, RngStream& rng) {
    auto tree = sample_labeled_tree(n_faces, rng);
    const int sign = rng.uniform_index(2) == 0 ? 1 : -1;
    return cvs_construct(tree, sign);
}

/// Graph distances from the pointed vertex to every other vertex.
inline std::vector<double> quad_root_distances(const Quadrangulation& q) {
    const auto d = bfs_metric(q, static_cast<std::size_t>(q.pointed_vertex));
    std::vector<double> out;
    out.reserve(d.size() - 1);
    for (std::size_t v = 0; v < d.size(); ++v)
        if (static_cast<std::int32_t>(v) != q.pointed_vertex) out.push_back(static_cast<double>(d[v]));
    return out;
}

/// Multiplicative rescaling kappa with mean(kappa * quad) = mean(snake)
/// over pooled distance-to-root samples.
inline double calibrate_scaling(std::span<const double> quad_distances, std::span<const double> snake_distances) {
    detail::require(!quad_distances.empty() && !snake_distances.empty(), "calibrate_scaling: empty sample set");
    const double mq = std::accumulate(quad_distances.begin(), quad_distances.end(), 0.0) /
                      static_cast<double>(quad_distances.size());
    const double ms = std::accumulate(snake_distances.begin(), snake_distances.end(), 0.0) /
                      static_cast<double>(snake_distances.size());
    detail::require(mq > 0.0, "calibrate_scaling: quadrangulation distances are all zero");
    return ms / mq;
}

// =============================================================================
// Persistence: JSON header fields plus flat half-edge tables
// =============================================================================

inline nlohmann::json to_json(const Quadrangulation& q, std::uint64_t seed) {
    return {{"format", "bml-quad"},    {"version", 1},
            {"n_faces", q.n_faces},    {"n_vertices", q.n_vertices},
            {"seed", seed},            {"root_half_edge", q.root_half_edge},
            {"pointed_vertex", q.pointed_vertex},
            {"next", q.next},          {"opposite", q.opposite},
            {"vertex", q.vertex}};
}

inline Quadrangulation quadrangulation_from_json(const nlohmann::json& j) {
    detail::require(j.value("format", "") == "bml-quad", "not a bml-quad document");
    Quadrangulation q;
    q.n_faces = j.at("n_faces").get<std::size_t>();
    q.n_vertices = j.at("n_vertices").get<std::size_t>();
    q.root_half_edge = j.at("root_half_edge").get<std::int32_t>();
    q.pointed_vertex = j.at("pointed_vertex").get<std::int32_t>();
    q.next = j.at("next").get<std::vector<std::int32_t>>();
    q.opposite = j.at("opposite").get<std::vector<std::int32_t>>();
    q.vertex = j.at("vertex").get<std::vector<std::int32_t>>();
    q.rebuild_adjacency();
    validate(q);
    return q;
}

}  // namespace bml
