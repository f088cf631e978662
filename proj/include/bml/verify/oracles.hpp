#pragma once

// Independent brute-force reference computations used by tests and by the
// acceptance suite. Everything here is exponential or cubic and meant for
// tiny inputs only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "bml/geodesic.hpp"
#include "bml/planar_map.hpp"
#include "bml/snake_map.hpp"

namespace bml::verify {

/// All Dyck paths with n up-steps, in lexicographic order (+1 before -1).
inline std::vector<std::vector<std::int8_t>> enumerate_dyck_paths(std::size_t n) {
    std::vector<std::vector<std::int8_t>> out;
    std::vector<std::int8_t> cur;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t up, std::size_t height) {
        if (cur.size() == 2 * n) {
            out.push_back(cur);
            return;
        }
        if (up < n) {
            cur.push_back(1);
            rec(up + 1, height + 1);
            cur.pop_back();
        }
        if (height > 0) {
            cur.push_back(-1);
            rec(up, height - 1);
            cur.pop_back();
        }
    };
    rec(0, 0);
    return out;
}

/// All labeled plane trees with n edges: every Dyck path times every
/// assignment of {-1, 0, +1} label increments.
inline std::vector<LabeledPlaneTree> enumerate_labeled_trees(std::size_t n) {
    std::vector<LabeledPlaneTree> out;
    std::size_t assignments = 1;
    for (std::size_t i = 0; i < n; ++i) assignments *= 3;
    for (const auto& contour : enumerate_dyck_paths(n)) {
        LabeledPlaneTree t;
        t.n_edges = n;
        t.contour = contour;
        t.labels.assign(n + 1, 0);
        const auto parent = tree_parents(t);
        for (std::size_t code = 0; code < assignments; ++code) {
            std::size_t c = code;
            for (std::size_t v = 1; v <= n; ++v) {
                t.labels[v] = t.labels[static_cast<std::size_t>(parent[v])] + static_cast<std::int32_t>(c % 3) - 1;
                c /= 3;
            }
            out.push_back(t);
        }
    }
    return out;
}

struct CvsEnumeration {
    std::size_t inputs = 0;
    std::size_t distinct_pointed = 0;
    std::size_t distinct_rooted = 0;
    /// Every rooted (unpointed) map arises exactly n + 2 times.
    bool uniform_multiplicity = true;
    bool all_valid = true;
    bool distance_identity = true;
};

/// Runs cvs_construct on every (tree, sign) input with n edges.
inline CvsEnumeration enumerate_cvs(std::size_t n) {
    CvsEnumeration e;
    std::set<std::vector<std::int32_t>> pointed;
    std::map<std::vector<std::int32_t>, std::size_t> rooted;
    for (const auto& t : enumerate_labeled_trees(n))
        for (int sign : {1, -1}) {
            const auto q = cvs_construct(t, sign);
            ++e.inputs;
            try {
                validate(q);
            } catch (const std::invalid_argument&) {
                e.all_valid = false;
            }
            pointed.insert(canonical_code(q, true));
            ++rooted[canonical_code(q, false)];
            const auto d = bfs_metric(q, static_cast<std::size_t>(q.pointed_vertex));
            const auto lmin = *std::min_element(t.labels.begin(), t.labels.end());
            for (std::size_t v = 0; v <= n; ++v)
                if (d[v] != t.labels[v] - lmin + 1) e.distance_identity = false;
        }
    e.distinct_pointed = pointed.size();
    e.distinct_rooted = rooted.size();
    for (const auto& [code, mult] : rooted)
        if (mult != n + 2) e.uniform_multiplicity = false;
    return e;
}

/// Number of rooted quadrangulations with n faces: 2 * 3^n * (2n)! / (n! (n+2)!).
inline std::uint64_t rooted_quadrangulation_count(std::size_t n) {
    std::uint64_t catalan = 1;  // Catalan(n)
    for (std::size_t k = 0; k < n; ++k) catalan = catalan * 2 * (2 * k + 1) / (k + 2);
    std::uint64_t p3 = 1;
    for (std::size_t k = 0; k < n; ++k) p3 *= 3;
    return 2 * p3 * catalan / (n + 2);
}

/// Chain infimum of d_circ by exhaustive search over ordered chains of
/// distinct intermediate points.
inline std::vector<double> brute_force_chain_metric(const BrownianSnakeSample& snake) {
    const std::size_t n = snake.size();
    const auto dc = d_circ_matrix(snake);
    std::vector<double> best(dc);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            std::vector<char> used(n, 0);
            used[a] = 1;
            std::function<void(std::size_t, double)> rec = [&](std::size_t cur, double len) {
                best[a * n + b] = std::min(best[a * n + b], len + dc[cur * n + b]);
                for (std::size_t w = 0; w < n; ++w)
                    if (!used[w] && w != b) {
                        used[w] = 1;
                        rec(w, len + dc[cur * n + w]);
                        used[w] = 0;
                    }
            };
            rec(a, 0.0);
        }
    for (std::size_t i = 0; i < n; ++i) best[i * n + i] = 0.0;
    return best;
}

/// All simple a -> b paths of minimal total length, by exhaustive DFS.
/// Returned as sorted vertex sequences.
template <GeodesicSpace S>
std::vector<std::vector<std::size_t>> brute_force_geodesics(const S& space, std::size_t a, std::size_t b, double slack) {
    std::vector<std::pair<double, std::vector<std::size_t>>> all;
    std::vector<std::size_t> cur{a};
    std::vector<char> on(space.size(), 0);
    on[a] = 1;
    std::function<void(std::size_t, double)> rec = [&](std::size_t u, double len) {
        if (u == b) {
            all.emplace_back(len, cur);
            return;
        }
        space.for_each_neighbor(u, [&](std::size_t v, double w) {
            if (on[v]) return;
            on[v] = 1;
            cur.push_back(v);
            rec(v, len + w);
            cur.pop_back();
            on[v] = 0;
        });
    };
    rec(a, 0.0);
    double best = kInf;
    for (const auto& [len, p] : all) best = std::min(best, len);
    std::vector<std::vector<std::size_t>> out;
    for (const auto& [len, p] : all)
        if (len <= best + slack) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
}

/// Maximum number (capped at k) of pairwise center-disjoint geodesic segments
/// from `center` to the radius sphere, by listing every segment and trying
/// every subset.
template <GeodesicSpace S>
std::size_t brute_force_star(const S& space, std::size_t center, std::size_t k, double radius) {
    const auto dz = space.distances_from_set(std::span<const std::size_t>(&center, 1));
    const double slack = default_slack(space, radius);
    std::vector<std::vector<std::size_t>> segments;
    std::vector<std::size_t> cur{center};
    std::function<void(std::size_t)> rec = [&](std::size_t u) {
        if (dz[u] >= radius - slack) {
            segments.push_back(cur);
            return;
        }
        space.for_each_neighbor(u, [&](std::size_t v, double w) {
            if (dz[v] > dz[u] && dz[u] + w <= dz[v] + slack) {
                cur.push_back(v);
                rec(v);
                cur.pop_back();
            }
        });
    };
    rec(center);
    std::vector<std::vector<std::size_t>> sets;
    for (auto s : segments) {
        s.erase(s.begin());
        std::sort(s.begin(), s.end());
        sets.push_back(std::move(s));
    }
    auto disjoint = [](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
        std::vector<std::size_t> both;
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
        return both.empty();
    };
    std::size_t best = 0;
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t)> search = [&](std::size_t from) {
        best = std::max(best, chosen.size());
        if (best >= k) return;
        for (std::size_t i = from; i < sets.size(); ++i) {
            bool ok = true;
            for (auto c : chosen) ok = ok && disjoint(sets[c], sets[i]);
            if (!ok) continue;
            chosen.push_back(i);
            search(i + 1);
            chosen.pop_back();
        }
    };
    search(0);
    return std::min(best, k);
}

/// Hausdorff distance by the definitional double loop over a full distance matrix.
inline double brute_force_hausdorff(const std::vector<double>& dmat, std::size_t n, std::span<const std::size_t> a,
                                    std::span<const std::size_t> b) {
    double h = 0.0;
    for (auto x : a) {
        double m = kInf;
        for (auto y : b) m = std::min(m, dmat[x * n + y]);
        h = std::max(h, m);
    }
    for (auto y : b) {
        double m = kInf;
        for (auto x : a) m = std::min(m, dmat[x * n + y]);
        h = std::max(h, m);
    }
    return h;
}

/// Inverse of the Dirichlet graph Laplacian 4I - A on the (n-2)^2 interior
/// of an n x n box, by Gauss-Jordan elimination. Row-major, interior vertex
/// (x, y), 1 <= x, y <= n-2, has index (y-1)(n-2) + (x-1).
inline std::vector<double> dirichlet_green_function(std::size_t n) {
    const std::size_t m = n - 2, size = m * m;
    std::vector<double> a(size * size, 0.0), inv(size * size, 0.0);
    for (std::size_t y = 0; y < m; ++y)
        for (std::size_t x = 0; x < m; ++x) {
            const std::size_t i = y * m + x;
            a[i * size + i] = 4.0;
            if (x > 0) a[i * size + i - 1] = -1.0;
            if (x + 1 < m) a[i * size + i + 1] = -1.0;
            if (y > 0) a[i * size + i - m] = -1.0;
            if (y + 1 < m) a[i * size + i + m] = -1.0;
        }
    for (std::size_t i = 0; i < size; ++i) inv[i * size + i] = 1.0;
    for (std::size_t col = 0; col < size; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < size; ++r)
            if (std::abs(a[r * size + col]) > std::abs(a[piv * size + col])) piv = r;
        for (std::size_t k = 0; k < size; ++k) {
            std::swap(a[col * size + k], a[piv * size + k]);
            std::swap(inv[col * size + k], inv[piv * size + k]);
        }
        const double d = a[col * size + col];
        for (std::size_t k = 0; k < size; ++k) {
            a[col * size + k] /= d;
            inv[col * size + k] /= d;
        }
        for (std::size_t r = 0; r < size; ++r) {
            if (r == col) continue;
            const double f = a[r * size + col];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < size; ++k) {
                a[r * size + k] -= f * a[col * size + k];
                inv[r * size + k] -= f * inv[col * size + k];
            }
        }
    }
    return inv;
}

// -----------------------------------------------------------------------------
// Fixture graphs
// -----------------------------------------------------------------------------

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

inline GraphSpace path_graph(std::size_t n) {
    EdgeList e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return GraphSpace(n, e);
}

inline GraphSpace cycle_graph(std::size_t n) {
    EdgeList e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return GraphSpace(n, e);
}

/// Center 0 with `legs` paths of `length` edges each.
inline GraphSpace star_graph(std::size_t legs, std::size_t length) {
    EdgeList e;
    std::size_t next = 1;
    for (std::size_t l = 0; l < legs; ++l) {
        std::size_t prev = 0;
        for (std::size_t s = 0; s < length; ++s) {
            e.emplace_back(prev, next);
            prev = next++;
        }
    }
    return GraphSpace(next, e);
}

inline GraphSpace grid_graph(std::size_t w, std::size_t h) {
    EdgeList e;
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            if (x + 1 < w) e.emplace_back(y * w + x, y * w + x + 1);
            if (y + 1 < h) e.emplace_back(y * w + x, (y + 1) * w + x);
        }
    return GraphSpace(w * h, e);
}

struct NetworkFixture {
    GraphSpace space;
    std::size_t u = 0;
    std::size_t v = 0;
};

/// Normal (j, k)-network: u reaches a merge vertex m1 through j disjoint
/// two-edge arms, m1 -> x -> m2 is the shared middle, and m2 reaches v
/// through k disjoint two-edge arms.
inline NetworkFixture normal_network(std::size_t j, std::size_t k) {
    EdgeList e;
    const std::size_t u = 0, m1 = 1, x = 2, m2 = 3, v = 4;
    std::size_t next = 5;
    for (std::size_t i = 0; i < j; ++i) {
        e.emplace_back(u, next);
        e.emplace_back(next++, m1);
    }
    e.emplace_back(m1, x);
    e.emplace_back(x, m2);
    for (std::size_t i = 0; i < k; ++i) {
        e.emplace_back(m2, next);
        e.emplace_back(next++, v);
    }
    return {GraphSpace(next, e), u, v};
}

}  // namespace bml::verify
