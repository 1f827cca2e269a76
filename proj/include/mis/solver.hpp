#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mis/evolution.hpp"
#include "mis/graph.hpp"
#include "mis/kernel.hpp"
#include "mis/local_search.hpp"
#include "mis/partition.hpp"
#include "mis/rng.hpp"
#include "mis/solution_io.hpp"

namespace mis {

struct EmptySolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when the reduction bookkeeping and an actual reconstructed solution
// disagree — always a logic bug, never repaired silently.
struct ConsistencyFailure : std::logic_error {
    using std::logic_error::logic_error;
};

struct SolverConfig {
    std::uint64_t seed = 0;
    double time_limit_s = 10.0;
    std::int64_t mu = 1000;
    double lambda_fraction = 0.1;
    NodeID population = 50;
    double epsilon = 0.25;
    int pool_size = 16;
};

struct SolveResult {
    VertexSet vertices;                        // best solution, original-graph ids
    NodeID size = 0;
    double found_at = 0.0;                     // seconds from start to the best
    int level = 0;                             // reduction level of the best (0 = initial greedy)
    int depth_reached = 0;                     // reduction levels entered
    NodeID first_kernel_size = 0;
    std::int64_t first_kernel_theta = 0;
    std::vector<ImprovementPoint> improvements;
};

using ImprovementCallback = std::function<void(const ImprovementPoint&)>;

// Picks the `max(1, floor(fraction * |solution|))` smallest-degree solution
// vertices; ties at the cutoff degree are broken uniformly at random.
inline VertexSet select_fix_set(const Graph& kernel, const VertexSet& solution,
                                double fraction, std::uint64_t seed) {
    if (solution.size() == 0)
        throw EmptySolution("fix-set selection needs a nonempty solution");
    const NodeID want = std::max<NodeID>(
        1, static_cast<NodeID>(std::floor(fraction * static_cast<double>(solution.size()))));

    NodeID max_degree = 0;
    solution.for_each([&](NodeID v) { max_degree = std::max(max_degree, kernel.degree(v)); });
    std::vector<std::vector<NodeID>> by_degree(static_cast<std::size_t>(max_degree) + 1);
    solution.for_each(
        [&](NodeID v) { by_degree[static_cast<std::size_t>(kernel.degree(v))].push_back(v); });

    Rng rng(seed);
    VertexSet fix(kernel.num_vertices());
    NodeID taken = 0;
    for (auto& bucket : by_degree) {
        if (taken >= want) break;
        if (taken + static_cast<NodeID>(bucket.size()) <= want) {
            for (NodeID v : bucket) fix.insert(v);
            taken += static_cast<NodeID>(bucket.size());
        } else {
            // cutoff degree: draw the remainder without replacement
            for (std::size_t i = 0; taken < want; ++i, ++taken) {
                const std::size_t j =
                    i + static_cast<std::size_t>(rng.next_below(bucket.size() - i));
                std::swap(bucket[i], bucket[j]);
                fix.insert(bucket[i]);
            }
        }
    }
    return fix;
}

// Commits `fixed` to the solution by deleting its closed neighborhood; the
// resulting graph no longer carries an optimality guarantee but reopens the
// reduction space.
inline std::pair<Graph, SubgraphMap> reduce_by_fixing(const Graph& kernel,
                                                      const VertexSet& fixed) {
    const VertexSet dropped = closed_neighborhood(kernel, fixed);
    VertexSet keep(kernel.num_vertices());
    for (NodeID v = 0; v < kernel.num_vertices(); ++v)
        if (!dropped.contains(v)) keep.insert(v);
    return induced_subgraph(kernel, keep);
}

// One reduction level: the exact-reduction record for this level's input
// graph, plus the fixed vertices and the mapping into the next level.
struct SolverFrame {
    KernelizeResult reduction;
    std::vector<NodeID> fixed;  // kernel-id vertices committed to the solution
    SubgraphMap next_map;       // next level's vertex -> this level's kernel id
};

// Lifts a solution of the kernel at `level_index` back to the original
// graph, replaying every exact-reduction log and re-adding the fixed
// vertices on the way up.
inline VertexSet reconstruct_full(const std::vector<SolverFrame>& frames,
                                  std::size_t level_index, VertexSet solution) {
    try {
        for (std::size_t j = level_index + 1; j-- > 0;) {
            VertexSet base = restore_solution(frames[j].reduction, solution);
            if (j == 0) return base;
            const SolverFrame& up = frames[j - 1];
            VertexSet lifted(up.reduction.kernel.num_vertices());
            base.for_each([&](NodeID v) { lifted.insert(up.next_map.to_host(v)); });
            for (NodeID u : up.fixed) lifted.insert(u);
            solution = std::move(lifted);
        }
    } catch (const InvalidKernelSolution& e) {
        throw ConsistencyFailure(std::string("solution lift failed: ") + e.what());
    }
    throw ConsistencyFailure("solution lift failed: empty frame chain");
}

// Full solver: alternates exact kernelization and evolutionary search,
// committing a few low-degree solution vertices between levels to reopen the
// reduction space, until a level's kernel is empty or time runs out. Every
// best-solution update reconstructs and validates a full original-graph
// solution; the running best is returned.
inline SolveResult solve(const Graph& g, const SolverConfig& config = {},
                         const ImprovementCallback& on_improve = {}) {
    const auto start = Clock::now();
    const auto cutoff =
        start + std::chrono::duration_cast<Clock::duration>(
                    std::chrono::duration<double>(std::max(0.0, config.time_limit_s)));
    const Deadline deadline = cutoff;
    auto out_of_time = [&] { return Clock::now() >= cutoff; };
    auto elapsed = [&] {
        return std::chrono::duration<double>(Clock::now() - start).count();
    };

    Rng rng(config.seed);
    SolveResult result;
    result.vertices = VertexSet(g.num_vertices());

    auto record_best = [&](VertexSet full, int level, std::int64_t predicted) {
        if (!is_independent_set(g, full))
            throw ConsistencyFailure("candidate solution is not independent");
        if (predicted >= 0 && full.size() != predicted)
            throw ConsistencyFailure("candidate size disagrees with offset bookkeeping");
        if (full.size() <= result.size && !result.improvements.empty()) return;
        result.size = full.size();
        result.vertices = std::move(full);
        result.found_at = elapsed();
        result.level = level;
        const ImprovementPoint point{result.found_at, result.size, level};
        result.improvements.push_back(point);
        if (on_improve) on_improve(point);
    };

    {
        // a maximal greedy solution up front, so even an immediate timeout
        // has something valid to return
        SearchState st(g, rng.next_u64());
        greedy_maximalize(st);
        record_best(st.solution(), 0, -1);
    }

    std::vector<SolverFrame> frames;
    Graph working = g;
    std::int64_t gamma = 0;

    while (working.num_vertices() > 0 && !out_of_time()) {
        frames.push_back(SolverFrame{kernelize(working), {}, {}});
        SolverFrame& frame = frames.back();
        const std::size_t frame_index = frames.size() - 1;
        const int level = static_cast<int>(frames.size());
        const std::int64_t theta = frame.reduction.theta;
        const Graph& kernel = frame.reduction.kernel;
        result.depth_reached = level;
        if (level == 1) {
            result.first_kernel_size = kernel.num_vertices();
            result.first_kernel_theta = theta;
        }

        if (kernel.num_vertices() == 0) {
            if (gamma + theta > result.size)
                record_best(reconstruct_full(frames, frame_index, VertexSet(0)), level,
                            gamma + theta);
            break;
        }
        if (out_of_time()) break;

        const auto pool =
            build_separator_pool(kernel, config.epsilon, config.pool_size, rng.next_u64());
        const auto evo = evolve(
            kernel, pool, config.population, config.mu, rng.next_u64(), deadline,
            [&](const Individual& candidate) {
                if (gamma + theta + candidate.fitness > result.size)
                    record_best(reconstruct_full(frames, frame_index, candidate.solution),
                                level, gamma + theta + candidate.fitness);
            });
        if (out_of_time()) break;

        VertexSet fix(kernel.num_vertices());
        if (evo.best.solution.size() == 0) {
            // cannot happen after greedy population init; fall back to the
            // lowest-degree vertex so the graph still shrinks
            NodeID pick = 0;
            for (NodeID v = 1; v < kernel.num_vertices(); ++v)
                if (kernel.degree(v) < kernel.degree(pick)) pick = v;
            fix.insert(pick);
        } else {
            fix = select_fix_set(kernel, evo.best.solution, config.lambda_fraction,
                                 rng.next_u64());
        }
        frame.fixed = fix.to_vector();
        auto [next_graph, next_map] = reduce_by_fixing(kernel, fix);
        frame.next_map = std::move(next_map);
        working = std::move(next_graph);
        gamma += theta + fix.size();
    }
    return result;
}

}  // namespace mis
