#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mis {

using NodeID = int;

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-universe vertex set backed by a bit vector with a cached cardinality.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(NodeID universe)
        : universe_(universe), words_((static_cast<std::size_t>(universe) + 63) / 64, 0) {}

    NodeID universe_size() const { return universe_; }
    NodeID size() const { return count_; }
    bool empty() const { return count_ == 0; }

    bool contains(NodeID v) const {
        return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1u;
    }

    // Returns true if membership changed.
    bool insert(NodeID v) {
        std::uint64_t& w = words_[static_cast<std::size_t>(v) >> 6];
        const std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (w & bit) return false;
        w |= bit;
        ++count_;
        return true;
    }

    bool erase(NodeID v) {
        std::uint64_t& w = words_[static_cast<std::size_t>(v) >> 6];
        const std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (!(w & bit)) return false;
        w &= ~bit;
        --count_;
        return true;
    }

    void clear() {
        std::fill(words_.begin(), words_.end(), 0);
        count_ = 0;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                const int b = std::countr_zero(w);
                f(static_cast<NodeID>(i * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
    }

    std::vector<NodeID> to_vector() const {
        std::vector<NodeID> out;
        out.reserve(static_cast<std::size_t>(count_));
        for_each([&](NodeID v) { out.push_back(v); });
        return out;
    }

    NodeID symmetric_difference_size(const VertexSet& other) const {
        NodeID d = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            d += std::popcount(words_[i] ^ other.words_[i]);
        return d;
    }

    bool operator==(const VertexSet& other) const {
        return universe_ == other.universe_ && words_ == other.words_;
    }

private:
    NodeID universe_ = 0;
    NodeID count_ = 0;
    std::vector<std::uint64_t> words_;
};

// Immutable undirected graph in compressed sparse row form. Vertex ids are
// dense 0-based; neighbor lists are strictly sorted, symmetric, loop-free.
class Graph {
public:
    Graph() = default;

    static Graph from_edge_list(NodeID n, const std::vector<std::pair<NodeID, NodeID>>& edges) {
        if (n < 0) throw GraphError("vertex count must be non-negative");
        std::vector<std::vector<NodeID>> adj(static_cast<std::size_t>(n));
        for (const auto& [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw GraphError("edge endpoint out of range: (" + std::to_string(u) + "," +
                                 std::to_string(v) + ")");
            if (u == v)
                throw GraphError("self-loop at vertex " + std::to_string(u));
            adj[static_cast<std::size_t>(u)].push_back(v);
            adj[static_cast<std::size_t>(v)].push_back(u);
        }
        return from_adjacency(std::move(adj));
    }

    // Takes possibly unsorted lists with duplicates; both directions must be
    // derivable (the lists are merged symmetrically).
    static Graph from_adjacency(std::vector<std::vector<NodeID>> adj) {
        Graph g;
        g.n_ = static_cast<NodeID>(adj.size());
        g.xadj_.assign(static_cast<std::size_t>(g.n_) + 1, 0);
        for (auto& list : adj) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        std::size_t total = 0;
        for (const auto& list : adj) total += list.size();
        g.adjncy_.reserve(total);
        for (NodeID v = 0; v < g.n_; ++v) {
            for (NodeID u : adj[static_cast<std::size_t>(v)]) g.adjncy_.push_back(u);
            g.xadj_[static_cast<std::size_t>(v) + 1] = static_cast<std::int64_t>(g.adjncy_.size());
        }
        g.m_ = static_cast<std::int64_t>(g.adjncy_.size()) / 2;
        return g;
    }

    NodeID num_vertices() const { return n_; }
    std::int64_t num_edges() const { return m_; }

    NodeID degree(NodeID v) const {
        return static_cast<NodeID>(xadj_[static_cast<std::size_t>(v) + 1] -
                                   xadj_[static_cast<std::size_t>(v)]);
    }

    std::span<const NodeID> neighbors(NodeID v) const {
        return {adjncy_.data() + xadj_[static_cast<std::size_t>(v)],
                static_cast<std::size_t>(degree(v))};
    }

    bool has_edge(NodeID u, NodeID v) const {
        const auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

private:
    NodeID n_ = 0;
    std::int64_t m_ = 0;
    std::vector<std::int64_t> xadj_ = {0};
    std::vector<NodeID> adjncy_;
};

// Bijection between the kept vertices of a host graph and the dense ids of an
// extracted subgraph. Synthetic host ids (no original preimage) are allowed.
struct SubgraphMap {
    std::vector<NodeID> forward;   // host id -> sub id, or -1
    std::vector<NodeID> backward;  // sub id -> host id

    NodeID to_sub(NodeID host) const { return forward[static_cast<std::size_t>(host)]; }
    NodeID to_host(NodeID sub) const { return backward[static_cast<std::size_t>(sub)]; }
};

inline std::pair<Graph, SubgraphMap> induced_subgraph(const Graph& g, const VertexSet& keep) {
    SubgraphMap map;
    map.forward.assign(static_cast<std::size_t>(g.num_vertices()), -1);
    map.backward = keep.to_vector();
    for (std::size_t i = 0; i < map.backward.size(); ++i)
        map.forward[static_cast<std::size_t>(map.backward[i])] = static_cast<NodeID>(i);

    std::vector<std::vector<NodeID>> adj(map.backward.size());
    for (std::size_t i = 0; i < map.backward.size(); ++i) {
        for (NodeID u : g.neighbors(map.backward[i])) {
            const NodeID su = map.forward[static_cast<std::size_t>(u)];
            if (su >= 0) adj[i].push_back(su);
        }
    }
    return {Graph::from_adjacency(std::move(adj)), std::move(map)};
}

inline bool is_independent_set(const Graph& g, const VertexSet& s) {
    bool ok = true;
    s.for_each([&](NodeID v) {
        if (!ok) return;
        for (NodeID u : g.neighbors(v)) {
            if (u > v) break;  // each edge checked once; lists are sorted
            if (s.contains(u)) {
                ok = false;
                return;
            }
        }
    });
    return ok;
}

inline VertexSet closed_neighborhood(const Graph& g, const VertexSet& u) {
    VertexSet out(g.num_vertices());
    u.for_each([&](NodeID v) {
        out.insert(v);
        for (NodeID w : g.neighbors(v)) out.insert(w);
    });
    return out;
}

}  // namespace mis
