#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mis/graph.hpp"
#include "mis/rng.hpp"

namespace mis {

using Clock = std::chrono::steady_clock;
using Deadline = std::optional<Clock::time_point>;

// Incremental state for iterated (1,2)-swap local search. Maintains, for
// every vertex, the number of solution neighbors (tightness) and the number
// of free neighbors (insertable: outside the solution with tightness zero),
// so swaps and greedy fills run in time proportional to the degrees touched.
class SearchState {
public:
    SearchState(const Graph& g, std::uint64_t seed)
        : graph_(&g),
          solution_(g.num_vertices()),
          tightness_(static_cast<std::size_t>(g.num_vertices()), 0),
          free_degree_(static_cast<std::size_t>(g.num_vertices()), 0),
          out_since_(static_cast<std::size_t>(g.num_vertices()), 0),
          in_queue_(static_cast<std::size_t>(g.num_vertices()), 0),
          rng_(seed) {
        for (NodeID v = 0; v < g.num_vertices(); ++v)
            free_degree_[static_cast<std::size_t>(v)] = g.degree(v);
    }

    const Graph& graph() const { return *graph_; }
    const VertexSet& solution() const { return solution_; }
    NodeID size() const { return solution_.size(); }
    int tightness(NodeID v) const { return tightness_[static_cast<std::size_t>(v)]; }
    bool in_solution(NodeID v) const { return solution_.contains(v); }
    bool is_free(NodeID v) const { return !in_solution(v) && tightness(v) == 0; }
    int free_degree(NodeID v) const { return free_degree_[static_cast<std::size_t>(v)]; }
    std::int64_t out_since(NodeID v) const { return out_since_[static_cast<std::size_t>(v)]; }
    Rng& rng() { return rng_; }

    void insert(NodeID v) {
        solution_.insert(v);
        for (NodeID u : graph_->neighbors(v)) --free_degree_[static_cast<std::size_t>(u)];
        for (NodeID u : graph_->neighbors(v)) {
            if (++tightness_[static_cast<std::size_t>(u)] == 1 && !in_solution(u))
                block(u);
        }
        enqueue(v);
    }

    void remove(NodeID v) {
        solution_.erase(v);
        out_since_[static_cast<std::size_t>(v)] = ++clock_;
        for (NodeID u : graph_->neighbors(v)) ++free_degree_[static_cast<std::size_t>(u)];
        for (NodeID u : graph_->neighbors(v)) {
            if (--tightness_[static_cast<std::size_t>(u)] == 0 && !in_solution(u))
                unblock(u);
            else if (tightness_[static_cast<std::size_t>(u)] == 1 && !in_solution(u))
                enqueue_host_of(u);
        }
    }

    // Replace the whole solution (used when seeding from an external set).
    void assign(const VertexSet& solution) {
        for (NodeID v : solution_.to_vector()) remove(v);
        solution.for_each([&](NodeID v) { insert(v); });
        candidate_queue_.clear();
        queue_head_ = 0;
        std::fill(in_queue_.begin(), in_queue_.end(), 0);
    }

    // ------------------------------------------------------- candidate queue

    void enqueue(NodeID v) {
        if (in_queue_[static_cast<std::size_t>(v)]) return;
        in_queue_[static_cast<std::size_t>(v)] = 1;
        candidate_queue_.push_back(v);
    }

    void enqueue_all_solution() {
        solution_.for_each([&](NodeID v) { enqueue(v); });
    }

    bool has_candidates() const { return queue_head_ < candidate_queue_.size(); }

    NodeID pop_candidate() {
        while (queue_head_ < candidate_queue_.size()) {
            const NodeID v = candidate_queue_[queue_head_++];
            in_queue_[static_cast<std::size_t>(v)] = 0;
            if (queue_head_ == candidate_queue_.size()) {
                candidate_queue_.clear();
                queue_head_ = 0;
            }
            if (in_solution(v)) return v;
        }
        return -1;
    }

private:
    void block(NodeID u) {
        for (NodeID w : graph_->neighbors(u)) --free_degree_[static_cast<std::size_t>(w)];
    }
    void unblock(NodeID u) {
        for (NodeID w : graph_->neighbors(u)) ++free_degree_[static_cast<std::size_t>(w)];
    }
    // u just became 1-tight: its unique solution neighbor may admit a swap now.
    void enqueue_host_of(NodeID u) {
        for (NodeID w : graph_->neighbors(u)) {
            if (in_solution(w)) {
                enqueue(w);
                return;
            }
        }
    }

    const Graph* graph_;
    VertexSet solution_;
    std::vector<int> tightness_;
    std::vector<int> free_degree_;
    std::vector<std::int64_t> out_since_;
    std::vector<NodeID> candidate_queue_;
    std::size_t queue_head_ = 0;
    std::vector<std::uint8_t> in_queue_;
    std::int64_t clock_ = 0;
    Rng rng_;
};

namespace detail {

inline bool in_set(const VertexSet* s, NodeID v) { return s == nullptr || s->contains(v); }

// Greedy fill restricted to `eligible` (or everything when null): repeatedly
// insert the free vertex with the fewest free neighbors, lowest id on ties
// (or a uniformly random minimum when random_ties is set).
inline NodeID maximalize(SearchState& st, const VertexSet* eligible, bool random_ties) {
    const Graph& g = st.graph();
    std::vector<std::vector<NodeID>> buckets;
    auto push = [&](NodeID v) {
        const int key = std::max(0, st.free_degree(v));
        if (static_cast<std::size_t>(key) >= buckets.size()) buckets.resize(key + 1);
        buckets[static_cast<std::size_t>(key)].push_back(v);
    };
    if (eligible) {
        eligible->for_each([&](NodeID v) {
            if (st.is_free(v)) push(v);
        });
    } else {
        for (NodeID v = 0; v < g.num_vertices(); ++v)
            if (st.is_free(v)) push(v);
    }

    NodeID added = 0;
    std::size_t level = 0;
    while (level < buckets.size()) {
        auto& bucket = buckets[level];
        // drop entries whose key or freeness went stale
        std::erase_if(bucket, [&](NodeID v) {
            return !st.is_free(v) ||
                   static_cast<std::size_t>(std::max(0, st.free_degree(v))) != level;
        });
        if (bucket.empty()) {
            ++level;
            continue;
        }
        std::size_t pick = 0;
        if (random_ties) {
            pick = static_cast<std::size_t>(st.rng().next_below(bucket.size()));
        } else {
            for (std::size_t i = 1; i < bucket.size(); ++i)
                if (bucket[i] < bucket[pick]) pick = i;
        }
        const NodeID v = bucket[pick];
        bucket[pick] = bucket.back();
        bucket.pop_back();

        st.insert(v);
        ++added;
        // neighbors of the vertices v just blocked lost a free neighbor and
        // belong in a cheaper bucket now
        for (NodeID w : g.neighbors(v)) {
            if (st.in_solution(w) || st.tightness(w) != 1) continue;  // not freshly blocked
            for (NodeID u : g.neighbors(w)) {
                if (!st.is_free(u) || !in_set(eligible, u)) continue;
                const std::size_t key = static_cast<std::size_t>(std::max(0, st.free_degree(u)));
                if (key < level) level = key;
                if (key >= buckets.size()) buckets.resize(key + 1);
                buckets[key].push_back(u);
            }
        }
    }
    return added;
}

}  // namespace detail

// Extends the solution to a maximal one, preferring vertices with the fewest
// free neighbors. Returns how many vertices were added.
inline NodeID greedy_maximalize(SearchState& st, const VertexSet* restrict_to = nullptr,
                                bool random_ties = false) {
    return detail::maximalize(st, restrict_to, random_ties);
}

// Looks for two non-adjacent 1-tight neighbors of the solution vertex v.
// Removing v and inserting the pair grows the solution by one.
inline std::optional<std::pair<NodeID, NodeID>> find_one_two_swap(const SearchState& st,
                                                                  NodeID v) {
    const Graph& g = st.graph();
    std::vector<NodeID> one_tight;
    for (NodeID u : g.neighbors(v))
        if (!st.in_solution(u) && st.tightness(u) == 1) one_tight.push_back(u);
    if (one_tight.size() < 2) return std::nullopt;

    // one_tight is sorted (neighbor lists are); for each x count how many of
    // the other candidates are adjacent to it — fewer than all means a
    // non-adjacent partner exists.
    for (std::size_t i = 0; i < one_tight.size(); ++i) {
        const NodeID x = one_tight[i];
        const auto nb = g.neighbors(x);
        std::size_t adjacent = 0;
        for (NodeID w : nb)
            if (std::binary_search(one_tight.begin(), one_tight.end(), w)) ++adjacent;
        if (adjacent == one_tight.size() - 1) continue;
        for (NodeID y : one_tight) {
            if (y == x || g.has_edge(x, y)) continue;
            return std::make_pair(std::min(x, y), std::max(x, y));
        }
    }
    return std::nullopt;
}

// Drains the candidate worklist, applying every (1,2)-swap found and filling
// any vertices freed in the process. An empty worklist means a full sweep:
// every solution vertex is examined. Returns the number of swaps applied; no
// swap exists among the examined neighborhoods once it returns.
inline NodeID local_search_pass(SearchState& st) {
    const bool sweep = !st.has_candidates();
    detail::maximalize(st, nullptr, false);  // restore maximality if the seed was not maximal
    if (sweep) st.enqueue_all_solution();
    NodeID improvements = 0;
    for (NodeID v; (v = st.pop_candidate()) != -1;) {
        const auto swap = find_one_two_swap(st, v);
        if (!swap) continue;
        st.remove(v);
        st.insert(swap->first);
        st.insert(swap->second);
        ++improvements;
        // v's other neighbors may have become free: fill greedily
        VertexSet freed(st.graph().num_vertices());
        for (NodeID u : st.graph().neighbors(v))
            if (st.is_free(u)) freed.insert(u);
        if (freed.size() > 0) detail::maximalize(st, &freed, false);
        st.enqueue(swap->first);
        st.enqueue(swap->second);
    }
    return improvements;
}

// Geometric perturbation strength: f = 1 + number of leading heads from a
// fair coin, so P(f = k) = 2^-k, capped at the vertex count.
inline NodeID sample_force_count(Rng& rng, NodeID cap) {
    NodeID f = 1;
    while (f < cap && rng.coin()) ++f;
    return std::min(f, cap);
}

// Forces v into the solution, removing any conflicting solution neighbors.
// No-op if v is already in the solution.
inline void force_insert(SearchState& st, NodeID v) {
    if (st.in_solution(v)) return;
    const Graph& g = st.graph();
    std::vector<NodeID> conflicts;
    for (NodeID u : g.neighbors(v))
        if (st.in_solution(u)) conflicts.push_back(u);
    for (NodeID u : conflicts) st.remove(u);
    st.insert(v);
}

// Forces a few vertices into the solution — random candidates, preferring
// those that have been outside the solution the longest — then restores
// maximality.
inline void perturb(SearchState& st) {
    const NodeID n = st.graph().num_vertices();
    if (n == 0) return;
    const NodeID f = sample_force_count(st.rng(), n);
    for (NodeID i = 0; i < f; ++i) {
        NodeID pick = -1;
        for (int attempt = 0; attempt < 4; ++attempt) {
            const NodeID cand = static_cast<NodeID>(st.rng().next_below(n));
            if (st.in_solution(cand)) continue;
            if (pick == -1 || st.out_since(cand) < st.out_since(pick)) pick = cand;
        }
        if (pick != -1) force_insert(st, pick);
    }
    greedy_maximalize(st);
}

// One iteration = perturb + local search. Keeps and returns the best
// solution seen; stops early at the deadline if one is given.
inline VertexSet arw_iterate(SearchState& st, std::int64_t rounds, const Deadline& deadline = {}) {
    VertexSet best = st.solution();
    for (std::int64_t round = 0; round < rounds; ++round) {
        if (deadline && Clock::now() >= *deadline) break;
        perturb(st);
        local_search_pass(st);
        if (st.size() > best.size()) best = st.solution();
    }
    return best;
}

}  // namespace mis
