#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mis/graph.hpp"

namespace mis {

struct InvalidKernelSolution : std::runtime_error {
    explicit InvalidKernelSolution(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------------------------------------- undo records

struct IncludeVertex {
    NodeID v;
};
struct ExcludeVertex {
    NodeID v;
};
// Degree-2 contraction of {left, folded, right} into fold_vertex.
struct Fold {
    NodeID fold_vertex;
    NodeID folded;
    NodeID left, right;
};
// Degree-3 twins u, v with a common edgeless neighborhood, replaced by a
// gadget adjacent to u's two-neighborhood.
struct TwinFold {
    NodeID gadget;
    NodeID u, v;
    std::array<NodeID, 3> shared;
};
// Two alternative sides: exactly one of side_a / side_b joins the solution,
// decided by which outside neighborhood the kernel solution touches.
struct AlternativeReduce {
    std::vector<NodeID> side_a, side_b;
    std::vector<NodeID> outside_a, outside_b;
};
// A zero-bound packing constraint forced all its variables into the solution.
struct PackingInclude {
    std::vector<NodeID> vertices;
};

using UndoRecord =
    std::variant<IncludeVertex, ExcludeVertex, Fold, TwinFold, AlternativeReduce, PackingInclude>;

// Sum over excluded-vertex indicators of the variables must stay <= bound.
struct PackingConstraint {
    std::vector<NodeID> variables;
    int bound = 0;
    bool dead = false;
};

struct KernelStats {
    std::int64_t pendant_fires = 0;
    std::int64_t fold_fires = 0;
    std::int64_t lp_includes = 0;
    std::int64_t unconfined_fires = 0;
    std::int64_t twin_fires = 0;
    std::int64_t alternative_fires = 0;
    std::int64_t packing_fires = 0;
    std::int64_t infeasible_packing = 0;
};

// ------------------------------------------------------------- kernel state

// Mutable reduction workspace over an immutable base graph. Vertices removed
// by reductions are marked dead; fold/twin gadget vertices get fresh ids past
// the base vertex count. Every change that must be reversible appends an
// UndoRecord, and theta tracks the guaranteed solution-size contribution.
class KernelState {
public:
    explicit KernelState(const Graph& base)
        : base_(&base), base_n_(base.num_vertices()), alive_count_(base.num_vertices()) {
        adj_.resize(static_cast<std::size_t>(base_n_));
        for (NodeID v = 0; v < base_n_; ++v) {
            const auto nb = base.neighbors(v);
            adj_[static_cast<std::size_t>(v)].assign(nb.begin(), nb.end());
        }
        alive_.assign(static_cast<std::size_t>(base_n_), 1);
        in_solution_.assign(static_cast<std::size_t>(base_n_), 0);
        constraints_of_.resize(static_cast<std::size_t>(base_n_));
        in_pendant_queue_.assign(static_cast<std::size_t>(base_n_), 0);
        in_fold_queue_.assign(static_cast<std::size_t>(base_n_), 0);
        for (NodeID v = 0; v < base_n_; ++v) touch(v);
    }

    const Graph& base() const { return *base_; }
    NodeID base_vertices() const { return base_n_; }
    NodeID capacity() const { return static_cast<NodeID>(adj_.size()); }
    NodeID alive_count() const { return alive_count_; }
    std::int64_t theta() const { return theta_; }
    const std::vector<UndoRecord>& log() const { return log_; }
    const KernelStats& stats() const { return stats_; }

    bool is_alive(NodeID v) const { return alive_[static_cast<std::size_t>(v)] != 0; }
    bool in_solution(NodeID v) const { return in_solution_[static_cast<std::size_t>(v)] != 0; }
    NodeID degree(NodeID v) const {
        return static_cast<NodeID>(adj_[static_cast<std::size_t>(v)].size());
    }
    const std::vector<NodeID>& neighbors(NodeID v) const {
        return adj_[static_cast<std::size_t>(v)];
    }
    bool has_live_edge(NodeID u, NodeID v) const {
        const auto& nb = adj_[static_cast<std::size_t>(u)];
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    std::vector<NodeID> forced_in() const {
        std::vector<NodeID> out;
        for (NodeID v = 0; v < capacity(); ++v)
            if (in_solution(v)) out.push_back(v);
        return out;
    }

    // Alive subgraph (including gadget vertices and overlay edges) plus the
    // mapping between state ids and kernel ids.
    std::pair<Graph, SubgraphMap> effective_graph() const {
        SubgraphMap map;
        map.forward.assign(adj_.size(), -1);
        for (NodeID v = 0; v < capacity(); ++v) {
            if (!is_alive(v)) continue;
            map.forward[static_cast<std::size_t>(v)] = static_cast<NodeID>(map.backward.size());
            map.backward.push_back(v);
        }
        std::vector<std::vector<NodeID>> sub(map.backward.size());
        for (std::size_t i = 0; i < map.backward.size(); ++i) {
            for (NodeID u : adj_[static_cast<std::size_t>(map.backward[i])])
                sub[i].push_back(map.forward[static_cast<std::size_t>(u)]);
        }
        return {Graph::from_adjacency(std::move(sub)), std::move(map)};
    }

    // ---------------------------------------------------------- decisions

    // Put v into the solution; its neighbors are excluded as a consequence.
    void include_vertex(NodeID v) { raw_include(v, true); }

    // Remove v from the graph without putting it in the solution. When the
    // exclusion is not already supported by an included neighbor, a packing
    // constraint "at least one neighbor of v joins the solution" is created.
    void exclude_vertex(NodeID v, bool create_constraint) {
        const std::vector<NodeID> nbrs = adj_[static_cast<std::size_t>(v)];
        kill(v);
        constraints_on_exclude(v);
        remove_edges_of(v);
        log_.push_back(ExcludeVertex{v});
        if (create_constraint && !nbrs.empty()) add_packing_constraint(nbrs, static_cast<int>(nbrs.size()) - 1);
    }

    // Remove v with its fate deferred to an enclosing fold/twin/alternative
    // record. Constraints mentioning v lose their meaning and are dropped.
    void consume_vertex(NodeID v) {
        kill(v);
        for (int idx : constraints_of_[static_cast<std::size_t>(v)])
            constraints_[static_cast<std::size_t>(idx)].dead = true;
        constraints_of_[static_cast<std::size_t>(v)].clear();
        remove_edges_of(v);
    }

    NodeID add_gadget_vertex(const std::vector<NodeID>& nbrs) {
        const NodeID id = capacity();
        adj_.push_back(nbrs);
        std::sort(adj_.back().begin(), adj_.back().end());
        alive_.push_back(1);
        in_solution_.push_back(0);
        constraints_of_.emplace_back();
        in_pendant_queue_.push_back(0);
        in_fold_queue_.push_back(0);
        ++alive_count_;
        for (NodeID u : nbrs) {
            adj_[static_cast<std::size_t>(u)].push_back(id);  // id exceeds all others: stays sorted
            touch(u);
        }
        touch(id);
        return id;
    }

    void add_overlay_edge(NodeID a, NodeID b) {
        auto& na = adj_[static_cast<std::size_t>(a)];
        const auto it = std::lower_bound(na.begin(), na.end(), b);
        if (it != na.end() && *it == b) return;
        na.insert(it, b);
        auto& nb = adj_[static_cast<std::size_t>(b)];
        nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
        touch(a);
        touch(b);
    }

    void append_record(UndoRecord record) { log_.push_back(std::move(record)); }
    void add_theta(std::int64_t delta) { theta_ += delta; }
    KernelStats& mutable_stats() { return stats_; }

    // ------------------------------------------------------------ packing

    void add_packing_constraint(std::vector<NodeID> variables, int bound) {
        if (bound >= static_cast<int>(variables.size())) return;  // vacuous
        const int idx = static_cast<int>(constraints_.size());
        for (NodeID v : variables) constraints_of_[static_cast<std::size_t>(v)].push_back(idx);
        constraints_.push_back({std::move(variables), bound, false});
        if (bound <= 0) pending_zero_.push_back(idx);
    }

    const std::vector<PackingConstraint>& packing_constraints() const { return constraints_; }

    std::vector<int> take_pending_zero() { return std::exchange(pending_zero_, {}); }
    void mark_constraint_dead(int idx) { constraints_[static_cast<std::size_t>(idx)].dead = true; }
    const PackingConstraint& constraint(int idx) const {
        return constraints_[static_cast<std::size_t>(idx)];
    }

    // ----------------------------------------------------------- worklists

    NodeID pop_pendant_candidate() {
        while (!pendant_queue_.empty()) {
            const NodeID v = pendant_queue_.back();
            pendant_queue_.pop_back();
            in_pendant_queue_[static_cast<std::size_t>(v)] = 0;
            if (is_alive(v) && degree(v) <= 1) return v;
        }
        return -1;
    }

    NodeID pop_fold_candidate() {
        while (!fold_queue_.empty()) {
            const NodeID v = fold_queue_.back();
            fold_queue_.pop_back();
            in_fold_queue_[static_cast<std::size_t>(v)] = 0;
            if (is_alive(v) && degree(v) == 2) return v;
        }
        return -1;
    }

    void raw_include(NodeID v, bool log_record) {
        const std::vector<NodeID> nbrs = adj_[static_cast<std::size_t>(v)];
        in_solution_[static_cast<std::size_t>(v)] = 1;
        kill(v);
        constraints_on_include(v);
        remove_edges_of(v);
        theta_ += 1;
        if (log_record) log_.push_back(IncludeVertex{v});
        for (NodeID u : nbrs)
            if (is_alive(u)) exclude_vertex(u, false);
    }

    // Scratch marker arrays shared by the scanning rules.
    std::vector<int>& scratch_mark(int which) {
        auto& s = scratch_[which];
        if (s.size() < adj_.size()) s.resize(adj_.size(), 0);
        return s;
    }
    int next_clock() { return ++clock_; }

private:
    void kill(NodeID v) {
        alive_[static_cast<std::size_t>(v)] = 0;
        --alive_count_;
    }

    void touch(NodeID v) {
        if (!is_alive(v)) return;
        const NodeID d = degree(v);
        if (d <= 1) {
            if (!in_pendant_queue_[static_cast<std::size_t>(v)]) {
                in_pendant_queue_[static_cast<std::size_t>(v)] = 1;
                pendant_queue_.push_back(v);
            }
        } else if (d == 2) {
            if (!in_fold_queue_[static_cast<std::size_t>(v)]) {
                in_fold_queue_[static_cast<std::size_t>(v)] = 1;
                fold_queue_.push_back(v);
            }
        }
    }

    void remove_edges_of(NodeID v) {
        for (NodeID u : adj_[static_cast<std::size_t>(v)]) {
            auto& nu = adj_[static_cast<std::size_t>(u)];
            nu.erase(std::lower_bound(nu.begin(), nu.end(), v));
            touch(u);
        }
        adj_[static_cast<std::size_t>(v)].clear();
    }

    void drop_variable(PackingConstraint& c, NodeID v) {
        const auto it = std::find(c.variables.begin(), c.variables.end(), v);
        if (it != c.variables.end()) c.variables.erase(it);
    }

    void constraints_on_include(NodeID v) {
        for (int idx : constraints_of_[static_cast<std::size_t>(v)]) {
            auto& c = constraints_[static_cast<std::size_t>(idx)];
            if (c.dead) continue;
            drop_variable(c, v);
            if (c.bound >= static_cast<int>(c.variables.size())) c.dead = true;  // satisfied
        }
        constraints_of_[static_cast<std::size_t>(v)].clear();
    }

    void constraints_on_exclude(NodeID v) {
        for (int idx : constraints_of_[static_cast<std::size_t>(v)]) {
            auto& c = constraints_[static_cast<std::size_t>(idx)];
            if (c.dead) continue;
            drop_variable(c, v);
            c.bound -= 1;
            if (c.bound < 0) {
                c.dead = true;
                ++stats_.infeasible_packing;
            } else if (c.bound >= static_cast<int>(c.variables.size())) {
                c.dead = true;  // satisfied
            } else if (c.bound == 0) {
                pending_zero_.push_back(idx);
            }
        }
        constraints_of_[static_cast<std::size_t>(v)].clear();
    }

    const Graph* base_;
    NodeID base_n_;
    NodeID alive_count_;
    std::vector<std::vector<NodeID>> adj_;
    std::vector<std::uint8_t> alive_, in_solution_;
    std::int64_t theta_ = 0;
    std::vector<UndoRecord> log_;
    KernelStats stats_;

    std::vector<PackingConstraint> constraints_;
    std::vector<std::vector<int>> constraints_of_;
    std::vector<int> pending_zero_;

    std::vector<NodeID> pendant_queue_, fold_queue_;
    std::vector<std::uint8_t> in_pendant_queue_, in_fold_queue_;

    std::array<std::vector<int>, 3> scratch_;
    int clock_ = 0;
};

// ------------------------------------------------------------------ rules

// Degree-0 vertices are always optimal to take; degree-1 vertices (pendants)
// are taken and their neighbor removed. Cascades until no candidate remains.
inline bool reduce_pendant(KernelState& st) {
    bool changed = false;
    for (NodeID v; (v = st.pop_pendant_candidate()) != -1;) {
        st.include_vertex(v);
        ++st.mutable_stats().pendant_fires;
        changed = true;
    }
    return changed;
}

// Degree-2 vertex with non-adjacent neighbors: contract the triple into one
// fold vertex; exactly one extra solution vertex is guaranteed either way.
inline bool reduce_fold(KernelState& st) {
    bool changed = false;
    for (NodeID v; (v = st.pop_fold_candidate()) != -1;) {
        const NodeID u = st.neighbors(v)[0];
        const NodeID w = st.neighbors(v)[1];
        if (st.has_live_edge(u, w)) continue;
        std::vector<NodeID> merged;
        std::set_union(st.neighbors(u).begin(), st.neighbors(u).end(), st.neighbors(w).begin(),
                       st.neighbors(w).end(), std::back_inserter(merged));
        std::erase_if(merged, [&](NodeID x) { return x == u || x == v || x == w; });
        st.consume_vertex(v);
        st.consume_vertex(u);
        st.consume_vertex(w);
        const NodeID f = st.add_gadget_vertex(merged);
        st.append_record(Fold{f, v, u, w});
        st.add_theta(1);
        ++st.mutable_stats().fold_fires;
        changed = true;
    }
    return changed;
}

namespace detail {

// Maximum matching in the bipartite double cover (left copy of every alive
// vertex against right copies of its neighbors), Hopcroft-Karp style with an
// explicit stack so deep augmenting paths cannot overflow.
struct DoubleCoverMatching {
    const std::vector<NodeID>& verts;      // alive state ids, ascending
    const std::vector<NodeID>& index_of;   // state id -> position in verts
    const KernelState& st;
    std::vector<int> match_l, match_r, dist;

    explicit DoubleCoverMatching(const std::vector<NodeID>& verts_,
                                 const std::vector<NodeID>& index_of_, const KernelState& st_)
        : verts(verts_), index_of(index_of_), st(st_) {
        const int k = static_cast<int>(verts.size());
        match_l.assign(k, -1);
        match_r.assign(k, -1);
        dist.assign(k, 0);
        run();
    }

    bool bfs() {
        const int k = static_cast<int>(verts.size());
        const int inf = std::numeric_limits<int>::max();
        std::vector<int> queue;
        for (int l = 0; l < k; ++l) {
            if (match_l[l] == -1) {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = inf;
            }
        }
        bool reachable_free = false;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int l = queue[head];
            for (NodeID nb : st.neighbors(verts[static_cast<std::size_t>(l)])) {
                const int r = index_of[static_cast<std::size_t>(nb)];
                const int l2 = match_r[r];
                if (l2 == -1) {
                    reachable_free = true;
                } else if (dist[l2] == inf) {
                    dist[l2] = dist[l] + 1;
                    queue.push_back(l2);
                }
            }
        }
        return reachable_free;
    }

    bool augment(int start) {
        struct Frame {
            int l;
            std::size_t next_edge;
            int via_r;
        };
        std::vector<Frame> stack{{start, 0, -1}};
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& nbrs = st.neighbors(verts[static_cast<std::size_t>(f.l)]);
            if (f.next_edge == nbrs.size()) {
                dist[f.l] = std::numeric_limits<int>::max();
                stack.pop_back();
                continue;
            }
            const int r = index_of[static_cast<std::size_t>(nbrs[f.next_edge++])];
            const int l2 = match_r[r];
            if (l2 == -1) {
                f.via_r = r;
                for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                    match_l[it->l] = it->via_r;
                    match_r[it->via_r] = it->l;
                }
                return true;
            }
            if (dist[l2] == dist[f.l] + 1) {
                f.via_r = r;
                stack.push_back({l2, 0, -1});
            }
        }
        return false;
    }

    void run() {
        while (bfs()) {
            for (int l = 0; l < static_cast<int>(verts.size()); ++l)
                if (match_l[l] == -1) augment(l);
        }
    }
};

}  // namespace detail

// Half-integral relaxation of the independent set polytope, solved on the
// bipartite double cover. Vertices whose relaxation value is 1 are taken
// (their neighbors, value 0, drop out). A vertex gets value 1 exactly when
// its left copy is alternating-reachable from an unmatched left vertex while
// its right copy is not.
inline bool reduce_lp(KernelState& st) {
    std::vector<NodeID> verts;
    std::vector<NodeID> index_of(static_cast<std::size_t>(st.capacity()), -1);
    for (NodeID v = 0; v < st.capacity(); ++v) {
        if (!st.is_alive(v)) continue;
        index_of[static_cast<std::size_t>(v)] = static_cast<NodeID>(verts.size());
        verts.push_back(v);
    }
    if (verts.empty()) return false;

    detail::DoubleCoverMatching hk(verts, index_of, st);

    const int k = static_cast<int>(verts.size());
    std::vector<std::uint8_t> reach_l(k, 0), reach_r(k, 0);
    std::vector<int> stack;
    for (int l = 0; l < k; ++l) {
        if (hk.match_l[l] == -1) {
            reach_l[static_cast<std::size_t>(l)] = 1;
            stack.push_back(l);
        }
    }
    while (!stack.empty()) {
        const int l = stack.back();
        stack.pop_back();
        for (NodeID nb : st.neighbors(verts[static_cast<std::size_t>(l)])) {
            const int r = hk.index_of[static_cast<std::size_t>(nb)];
            if (reach_r[static_cast<std::size_t>(r)]) continue;
            reach_r[static_cast<std::size_t>(r)] = 1;
            const int l2 = hk.match_r[r];
            if (l2 != -1 && !reach_l[static_cast<std::size_t>(l2)]) {
                reach_l[static_cast<std::size_t>(l2)] = 1;
                stack.push_back(l2);
            }
        }
    }

    std::vector<NodeID> take;
    for (int i = 0; i < k; ++i)
        if (reach_l[static_cast<std::size_t>(i)] && !reach_r[static_cast<std::size_t>(i)])
            take.push_back(verts[static_cast<std::size_t>(i)]);
    if (take.empty()) return false;
    for (NodeID v : take) {
        st.include_vertex(v);
        ++st.mutable_stats().lp_includes;
    }
    return true;
}

namespace detail {

// Confinement search. Starting from S = {v}, repeatedly pick the neighbor u
// of S with exactly one contact in S and the fewest outside neighbors; an
// empty outside set proves v unconfined, a singleton extends S.
inline bool is_unconfined(KernelState& st, NodeID v) {
    auto& in_s = st.scratch_mark(0);
    auto& in_ns = st.scratch_mark(1);
    auto& seen = st.scratch_mark(2);
    const int stamp = st.next_clock();

    std::vector<NodeID> s{v};
    in_s[static_cast<std::size_t>(v)] = stamp;
    in_ns[static_cast<std::size_t>(v)] = stamp;
    for (NodeID u : st.neighbors(v)) in_ns[static_cast<std::size_t>(u)] = stamp;

    while (true) {
        NodeID best_u = -1;
        int best_diff = std::numeric_limits<int>::max();
        NodeID best_single = -1;
        std::vector<NodeID> candidates;
        for (NodeID sv : s) {
            for (NodeID u : st.neighbors(sv)) {
                if (in_s[static_cast<std::size_t>(u)] == stamp) continue;
                if (seen[static_cast<std::size_t>(u)] == stamp) continue;
                seen[static_cast<std::size_t>(u)] = stamp;
                candidates.push_back(u);
            }
        }
        std::sort(candidates.begin(), candidates.end());
        for (NodeID u : candidates) {
            int contacts = 0;
            for (NodeID w : st.neighbors(u))
                if (in_s[static_cast<std::size_t>(w)] == stamp) ++contacts;
            if (contacts != 1) continue;
            int diff = 0;
            NodeID single = -1;
            for (NodeID w : st.neighbors(u)) {
                if (in_ns[static_cast<std::size_t>(w)] == stamp) continue;
                ++diff;
                single = w;
            }
            if (diff < best_diff) {
                best_diff = diff;
                best_u = u;
                best_single = single;
            }
        }
        if (best_u == -1) return false;             // confined: no eligible neighbor
        if (best_diff == 0) return true;            // unconfined
        if (best_diff > 1) return false;            // confined
        const NodeID w = best_single;               // extend S and retry
        s.push_back(w);
        in_s[static_cast<std::size_t>(w)] = stamp;
        in_ns[static_cast<std::size_t>(w)] = stamp;
        for (NodeID u : st.neighbors(w)) in_ns[static_cast<std::size_t>(u)] = stamp;
    }
}

}  // namespace detail

// Remove vertices that some optimal solution avoids. Each removal records a
// packing constraint: at least one neighbor of the removed vertex must end up
// in the solution.
inline bool reduce_unconfined(KernelState& st) {
    bool changed = false;
    for (NodeID v = 0; v < st.capacity(); ++v) {
        if (!st.is_alive(v) || st.degree(v) == 0) continue;
        if (detail::is_unconfined(st, v)) {
            st.exclude_vertex(v, true);
            ++st.mutable_stats().unconfined_fires;
            changed = true;
        }
    }
    return changed;
}

// Degree-3 twins. With an edge inside the shared neighborhood both twins are
// taken outright; otherwise the five vertices collapse into a gadget adjacent
// to the two-neighborhood, worth two solution vertices either way.
inline bool reduce_twin(KernelState& st) {
    bool changed = false;
    bool applied = true;
    while (applied) {
        applied = false;
        std::map<std::array<NodeID, 3>, NodeID> buckets;
        for (NodeID u = 0; u < st.capacity(); ++u) {
            if (!st.is_alive(u) || st.degree(u) != 3) continue;
            const auto& nb = st.neighbors(u);
            const std::array<NodeID, 3> key{nb[0], nb[1], nb[2]};
            const auto [it, fresh] = buckets.try_emplace(key, u);
            if (fresh) continue;

            const NodeID first = it->second;
            const std::array<NodeID, 3> shared = key;
            const bool has_inner_edge = st.has_live_edge(shared[0], shared[1]) ||
                                        st.has_live_edge(shared[0], shared[2]) ||
                                        st.has_live_edge(shared[1], shared[2]);
            if (has_inner_edge) {
                st.include_vertex(first);
                st.include_vertex(u);  // isolated once the shared neighborhood left
            } else {
                auto& mark = st.scratch_mark(0);
                const int stamp = st.next_clock();
                mark[static_cast<std::size_t>(first)] = stamp;
                mark[static_cast<std::size_t>(u)] = stamp;
                for (NodeID x : shared) mark[static_cast<std::size_t>(x)] = stamp;
                std::vector<NodeID> two_nbhd;
                for (NodeID x : shared)
                    for (NodeID y : st.neighbors(x))
                        if (mark[static_cast<std::size_t>(y)] != stamp) {
                            mark[static_cast<std::size_t>(y)] = stamp;
                            two_nbhd.push_back(y);
                        }
                std::sort(two_nbhd.begin(), two_nbhd.end());
                st.consume_vertex(first);
                st.consume_vertex(u);
                for (NodeID x : shared) st.consume_vertex(x);
                const NodeID gadget = st.add_gadget_vertex(two_nbhd);
                st.append_record(TwinFold{gadget, first, u, shared});
                st.add_theta(2);
            }
            ++st.mutable_stats().twin_fires;
            changed = true;
            applied = true;
            break;  // graph changed; rebuild the buckets
        }
    }
    return changed;
}

namespace detail {

inline void apply_alternative(KernelState& st, std::vector<NodeID> side_a,
                              std::vector<NodeID> side_b, const std::vector<NodeID>& common) {
    auto& mark = st.scratch_mark(0);
    const int stamp = st.next_clock();
    for (NodeID x : side_a) mark[static_cast<std::size_t>(x)] = stamp;
    for (NodeID x : side_b) mark[static_cast<std::size_t>(x)] = stamp;
    for (NodeID x : common) mark[static_cast<std::size_t>(x)] = stamp;

    auto outside = [&](const std::vector<NodeID>& side) {
        const int seen = st.next_clock();
        std::vector<NodeID> out;
        for (NodeID x : side)
            for (NodeID y : st.neighbors(x)) {
                if (mark[static_cast<std::size_t>(y)] == stamp) continue;
                auto& cell = st.scratch_mark(1)[static_cast<std::size_t>(y)];
                if (cell == seen) continue;
                cell = seen;
                out.push_back(y);
            }
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<NodeID> outside_a = outside(side_a);
    std::vector<NodeID> outside_b = outside(side_b);

    for (NodeID x : side_a) st.consume_vertex(x);
    for (NodeID x : side_b) st.consume_vertex(x);
    for (NodeID x : common) st.consume_vertex(x);
    for (NodeID a : outside_a)
        for (NodeID b : outside_b) st.add_overlay_edge(a, b);

    st.add_theta(static_cast<std::int64_t>(side_a.size()));
    st.append_record(AlternativeReduce{std::move(side_a), std::move(side_b),
                                       std::move(outside_a), std::move(outside_b)});
    ++st.mutable_stats().alternative_fires;
}

// Funnel: v and a neighbor u such that N(v) \ {u} induces a complete graph.
inline bool apply_first_funnel(KernelState& st) {
    for (NodeID v = 0; v < st.capacity(); ++v) {
        if (!st.is_alive(v) || st.degree(v) < 1) continue;
        const auto& nb = st.neighbors(v);
        NodeID p = -1, q = -1;
        for (std::size_t i = 0; i < nb.size() && p == -1; ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j)
                if (!st.has_live_edge(nb[i], nb[j])) {
                    p = nb[i];
                    q = nb[j];
                    break;
                }
        NodeID u = -1;
        if (p == -1) {
            u = nb[0];  // N(v) itself complete: any neighbor works
        } else {
            auto complete_without = [&](NodeID skip) {
                for (std::size_t i = 0; i < nb.size(); ++i) {
                    if (nb[i] == skip) continue;
                    for (std::size_t j = i + 1; j < nb.size(); ++j) {
                        if (nb[j] == skip) continue;
                        if (!st.has_live_edge(nb[i], nb[j])) return false;
                    }
                }
                return true;
            };
            if (complete_without(p)) u = p;
            else if (complete_without(q)) u = q;
        }
        if (u == -1) continue;
        std::vector<NodeID> common;
        std::set_intersection(st.neighbors(u).begin(), st.neighbors(u).end(),
                              st.neighbors(v).begin(), st.neighbors(v).end(),
                              std::back_inserter(common));
        apply_alternative(st, {u}, {v}, common);
        return true;
    }
    return false;
}

// Chordless 4-cycle a1 b1 a2 b2 with all degrees >= 3, disjoint outside
// neighborhoods of size at most two on each side.
inline bool apply_first_four_cycle(KernelState& st) {
    for (NodeID a1 = 0; a1 < st.capacity(); ++a1) {
        if (!st.is_alive(a1) || st.degree(a1) < 3) continue;
        const auto& nb = st.neighbors(a1);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const NodeID b1 = nb[i];
            if (st.degree(b1) < 3) continue;
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                const NodeID b2 = nb[j];
                if (st.degree(b2) < 3 || st.has_live_edge(b1, b2)) continue;
                for (NodeID a2 : st.neighbors(b1)) {
                    if (a2 == a1 || a2 == b2 || st.degree(a2) < 3) continue;
                    if (!st.has_live_edge(a2, b2) || st.has_live_edge(a1, a2)) continue;

                    auto collect = [&](NodeID x, NodeID y) {
                        std::vector<NodeID> out;
                        std::set_union(st.neighbors(x).begin(), st.neighbors(x).end(),
                                       st.neighbors(y).begin(), st.neighbors(y).end(),
                                       std::back_inserter(out));
                        std::erase_if(out, [&](NodeID z) {
                            return z == a1 || z == a2 || z == b1 || z == b2;
                        });
                        return out;
                    };
                    const std::vector<NodeID> outside_a = collect(a1, a2);
                    const std::vector<NodeID> outside_b = collect(b1, b2);
                    if (outside_a.size() > 2 || outside_b.size() > 2) continue;
                    std::vector<NodeID> overlap;
                    std::set_intersection(outside_a.begin(), outside_a.end(), outside_b.begin(),
                                          outside_b.end(), std::back_inserter(overlap));
                    if (!overlap.empty()) continue;

                    apply_alternative(st, {a1, a2}, {b1, b2}, {});
                    return true;
                }
            }
        }
    }
    return false;
}

}  // namespace detail

// Alternative structures: funnels and tight chordless 4-cycles. Exactly one
// of the two sides joins the solution; edges between the outside
// neighborhoods force the kernel to commit to a side.
inline bool reduce_alternative(KernelState& st) {
    bool changed = false;
    while (detail::apply_first_funnel(st) || detail::apply_first_four_cycle(st)) changed = true;
    return changed;
}

// Zero-bound packing constraints: every remaining variable must join the
// solution. A constraint whose variables span an edge is unsatisfiable and is
// reported via stats().infeasible_packing, then ignored.
inline bool reduce_packing_simple(KernelState& st) {
    bool changed = false;
    for (const int idx : st.take_pending_zero()) {
        const PackingConstraint& c = st.constraint(idx);
        if (c.dead || c.bound != 0) continue;
        if (c.variables.empty()) {
            st.mark_constraint_dead(idx);
            continue;
        }
        bool inner_edge = false;
        for (std::size_t i = 0; i < c.variables.size() && !inner_edge; ++i)
            for (std::size_t j = i + 1; j < c.variables.size(); ++j)
                if (st.has_live_edge(c.variables[i], c.variables[j])) {
                    inner_edge = true;
                    break;
                }
        if (inner_edge) {
            ++st.mutable_stats().infeasible_packing;
            st.mark_constraint_dead(idx);
            continue;
        }
        const std::vector<NodeID> forced = c.variables;
        st.mark_constraint_dead(idx);
        st.append_record(PackingInclude{forced});
        for (NodeID v : forced) st.raw_include(v, false);
        ++st.mutable_stats().packing_fires;
        changed = true;
    }
    return changed;
}

// --------------------------------------------------------------- kernelize

struct KernelizeResult {
    Graph kernel;
    SubgraphMap map;
    std::int64_t theta = 0;
    std::vector<UndoRecord> log;
    KernelStats stats;
    NodeID base_vertices = 0;
    NodeID state_capacity = 0;
};

using KernelObserver = std::function<void(const KernelState&)>;

// Applies the rules to a fixpoint, cheapest first, restarting from the top
// after every change. The observer, if given, runs after each rule that
// changed the state.
inline KernelizeResult kernelize(const Graph& g, const KernelObserver& observer = {}) {
    KernelState st(g);
    using Rule = bool (*)(KernelState&);
    static constexpr std::array<Rule, 7> rules = {
        &reduce_pendant, &reduce_fold,        &reduce_lp,             &reduce_unconfined,
        &reduce_twin,    &reduce_alternative, &reduce_packing_simple,
    };
    std::size_t i = 0;
    while (i < rules.size()) {
        if (rules[i](st)) {
            if (observer) observer(st);
            i = 0;
        } else {
            ++i;
        }
    }
    KernelizeResult result;
    auto [kernel, map] = st.effective_graph();
    result.kernel = std::move(kernel);
    result.map = std::move(map);
    result.theta = st.theta();
    result.log = st.log();
    result.stats = st.stats();
    result.base_vertices = st.base_vertices();
    result.state_capacity = st.capacity();
    return result;
}

// Replays the undo log in reverse on a kernel solution, producing an
// independent set of the original graph of size |kernel_solution| + theta.
inline VertexSet restore_solution(const KernelizeResult& reduction,
                                  const VertexSet& kernel_solution) {
    if (kernel_solution.universe_size() != reduction.kernel.num_vertices())
        throw InvalidKernelSolution("kernel solution universe does not match the kernel");
    if (!is_independent_set(reduction.kernel, kernel_solution))
        throw InvalidKernelSolution("kernel solution is not independent in the kernel");

    std::vector<std::uint8_t> in_sol(static_cast<std::size_t>(reduction.state_capacity), 0);
    kernel_solution.for_each(
        [&](NodeID sub) { in_sol[static_cast<std::size_t>(reduction.map.to_host(sub))] = 1; });

    const auto contains = [&](NodeID v) { return in_sol[static_cast<std::size_t>(v)] != 0; };
    const auto add = [&](NodeID v) { in_sol[static_cast<std::size_t>(v)] = 1; };

    for (auto it = reduction.log.rbegin(); it != reduction.log.rend(); ++it) {
        std::visit(
            [&](const auto& record) {
                using T = std::decay_t<decltype(record)>;
                if constexpr (std::is_same_v<T, IncludeVertex>) {
                    add(record.v);
                } else if constexpr (std::is_same_v<T, ExcludeVertex>) {
                    // excluded vertices stay out
                } else if constexpr (std::is_same_v<T, Fold>) {
                    if (contains(record.fold_vertex)) {
                        in_sol[static_cast<std::size_t>(record.fold_vertex)] = 0;
                        add(record.left);
                        add(record.right);
                    } else {
                        add(record.folded);
                    }
                } else if constexpr (std::is_same_v<T, TwinFold>) {
                    if (contains(record.gadget)) {
                        in_sol[static_cast<std::size_t>(record.gadget)] = 0;
                        for (NodeID x : record.shared) add(x);
                    } else {
                        add(record.u);
                        add(record.v);
                    }
                } else if constexpr (std::is_same_v<T, AlternativeReduce>) {
                    const bool a_blocked = std::any_of(record.outside_a.begin(),
                                                       record.outside_a.end(), contains);
                    for (NodeID x : a_blocked ? record.side_b : record.side_a) add(x);
                } else if constexpr (std::is_same_v<T, PackingInclude>) {
                    for (NodeID x : record.vertices) add(x);
                }
            },
            *it);
    }

    VertexSet out(reduction.base_vertices);
    for (NodeID v = 0; v < reduction.state_capacity; ++v) {
        if (!in_sol[static_cast<std::size_t>(v)]) continue;
        if (v >= reduction.base_vertices)
            throw InvalidKernelSolution("undo log left a gadget vertex unresolved");
        out.insert(v);
    }
    return out;
}

}  // namespace mis
