#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mis/graph.hpp"
#include "mis/rng.hpp"

namespace mis {

// A 2-way node separator: removing `separator` disconnects `block1` from
// `block2`, and the three sets partition the vertex set.
struct SeparatorDecomposition {
    VertexSet block1;
    VertexSet block2;
    VertexSet separator;
    double epsilon = 0.0;
};

namespace detail {

// Largest block size allowed for a 2-way split of n vertices.
inline NodeID balance_limit(NodeID n, double epsilon) {
    const NodeID half = (n + 1) / 2;
    return static_cast<NodeID>(std::floor((1.0 + epsilon) * half + 1e-9));
}

}  // namespace detail

inline NodeID cut_size(const Graph& g, const VertexSet& block1, const VertexSet& block2) {
    NodeID cut = 0;
    block1.for_each([&](NodeID v) {
        for (NodeID u : g.neighbors(v))
            if (block2.contains(u)) ++cut;
    });
    return cut;
}

// Splits the vertices into two blocks of near-equal size: breadth-first
// region growing from a random start vertex (restarting from the lowest
// unvisited vertex across components), then hill-climbing refinement that
// moves boundary vertices with positive cut gain while both blocks stay
// within the balance limit.
inline std::pair<VertexSet, VertexSet> bipartition(const Graph& g, double epsilon,
                                                   std::uint64_t seed) {
    const NodeID n = g.num_vertices();
    VertexSet block1(n);
    VertexSet block2(n);
    if (n == 0) return {block1, block2};

    Rng rng(seed);
    const NodeID target = (n + 1) / 2;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(n), 0);
    std::queue<NodeID> frontier;
    NodeID taken = 0;
    NodeID scan = 0;

    NodeID start = static_cast<NodeID>(rng.next_below(static_cast<std::uint64_t>(n)));
    visited[static_cast<std::size_t>(start)] = 1;
    frontier.push(start);
    while (taken < target) {
        if (frontier.empty()) {
            while (scan < n && visited[static_cast<std::size_t>(scan)]) ++scan;
            visited[static_cast<std::size_t>(scan)] = 1;
            frontier.push(scan);
        }
        const NodeID v = frontier.front();
        frontier.pop();
        block1.insert(v);
        ++taken;
        for (NodeID u : g.neighbors(v)) {
            if (!visited[static_cast<std::size_t>(u)]) {
                visited[static_cast<std::size_t>(u)] = 1;
                frontier.push(u);
            }
        }
    }
    for (NodeID v = 0; v < n; ++v)
        if (!block1.contains(v)) block2.insert(v);

    if (n > 2) {
        const NodeID limit = detail::balance_limit(n, epsilon);
        NodeID size1 = block1.size();
        NodeID size2 = block2.size();
        bool moved = true;
        for (int pass = 0; pass < 16 && moved; ++pass) {
            moved = false;
            for (NodeID v = 0; v < n; ++v) {
                const bool in_first = block1.contains(v);
                NodeID internal = 0;
                NodeID external = 0;
                for (NodeID u : g.neighbors(v)) {
                    if (block1.contains(u) == in_first)
                        ++internal;
                    else
                        ++external;
                }
                if (external <= internal) continue;
                if (in_first) {
                    if (size2 + 1 > limit) continue;
                    block1.erase(v);
                    block2.insert(v);
                    --size1;
                    ++size2;
                } else {
                    if (size1 + 1 > limit) continue;
                    block2.erase(v);
                    block1.insert(v);
                    --size2;
                    ++size1;
                }
                moved = true;
            }
        }
        if (size1 > limit || size2 > limit)
            throw std::logic_error("bipartition: balance limit violated");
    }
    return {block1, block2};
}

// True when the three sets partition the vertices, no edge joins the two
// blocks, and both blocks respect the balance limit.
inline bool is_valid_decomposition(const Graph& g, const SeparatorDecomposition& d) {
    const NodeID n = g.num_vertices();
    if (d.block1.universe_size() != n || d.block2.universe_size() != n ||
        d.separator.universe_size() != n)
        return false;
    for (NodeID v = 0; v < n; ++v) {
        const int memberships = static_cast<int>(d.block1.contains(v)) +
                                static_cast<int>(d.block2.contains(v)) +
                                static_cast<int>(d.separator.contains(v));
        if (memberships != 1) return false;
    }
    bool crossing = false;
    d.block1.for_each([&](NodeID v) {
        for (NodeID u : g.neighbors(v))
            if (d.block2.contains(u)) crossing = true;
    });
    if (crossing) return false;
    if (n > 2) {
        const NodeID limit = detail::balance_limit(n, d.epsilon);
        if (d.block1.size() > limit || d.block2.size() > limit) return false;
    }
    return true;
}

// Derives a node separator from a bipartition by covering its cut edges:
// repeatedly moves the vertex touching the most uncovered cut edges into the
// separator (ties: larger current block, then lower id).
inline SeparatorDecomposition node_separator(const Graph& g, double epsilon,
                                             std::uint64_t seed) {
    const NodeID n = g.num_vertices();
    auto [block1, block2] = bipartition(g, epsilon, seed);

    std::vector<std::uint8_t> side(static_cast<std::size_t>(n), 0);
    block2.for_each([&](NodeID v) { side[static_cast<std::size_t>(v)] = 1; });

    std::vector<NodeID> cut_degree(static_cast<std::size_t>(n), 0);
    std::vector<NodeID> boundary;
    for (NodeID v = 0; v < n; ++v) {
        NodeID crossing = 0;
        for (NodeID u : g.neighbors(v))
            if (side[static_cast<std::size_t>(u)] != side[static_cast<std::size_t>(v)])
                ++crossing;
        cut_degree[static_cast<std::size_t>(v)] = crossing;
        if (crossing > 0) boundary.push_back(v);
    }

    SeparatorDecomposition d;
    d.block1 = std::move(block1);
    d.block2 = std::move(block2);
    d.separator = VertexSet(n);
    d.epsilon = epsilon;

    NodeID size1 = d.block1.size();
    NodeID size2 = d.block2.size();
    for (;;) {
        NodeID best = -1;
        NodeID best_degree = 0;
        NodeID best_block = 0;
        for (NodeID v : boundary) {
            const NodeID deg = cut_degree[static_cast<std::size_t>(v)];
            if (deg <= 0) continue;
            const NodeID own = side[static_cast<std::size_t>(v)] == 0 ? size1 : size2;
            if (deg > best_degree || (deg == best_degree && own > best_block) ||
                (deg == best_degree && own == best_block && v < best)) {
                best = v;
                best_degree = deg;
                best_block = own;
            }
        }
        if (best == -1) break;
        const std::size_t b = static_cast<std::size_t>(best);
        cut_degree[b] = 0;
        d.separator.insert(best);
        if (side[b] == 0) {
            d.block1.erase(best);
            --size1;
        } else {
            d.block2.erase(best);
            --size2;
        }
        for (NodeID u : g.neighbors(best)) {
            const std::size_t uu = static_cast<std::size_t>(u);
            if (side[uu] != side[b] && !d.separator.contains(u) && cut_degree[uu] > 0)
                --cut_degree[uu];
        }
    }

    if (!is_valid_decomposition(g, d))
        throw std::logic_error("node_separator: invalid decomposition produced");
    return d;
}

// Precomputes `count` decompositions under different derived seeds, for
// round-robin use by combine operations.
inline std::vector<SeparatorDecomposition> build_separator_pool(const Graph& g, double epsilon,
                                                                int count, std::uint64_t seed) {
    std::vector<SeparatorDecomposition> pool;
    pool.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        pool.push_back(node_separator(g, epsilon, mix_seed(seed + static_cast<std::uint64_t>(i))));
    return pool;
}

}  // namespace mis
