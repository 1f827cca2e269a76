#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mis/graph.hpp"
#include "mis/local_search.hpp"
#include "mis/partition.hpp"
#include "mis/rng.hpp"

namespace mis {

struct InvalidDecomposition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A candidate solution and its size.
struct Individual {
    VertexSet solution;
    NodeID fitness = 0;
};

struct Population {
    std::vector<Individual> members;
    std::int64_t unsuccessful_streak = 0;

    const Individual& best() const {
        std::size_t best_index = 0;
        for (std::size_t i = 1; i < members.size(); ++i)
            if (members[i].fitness > members[best_index].fitness) best_index = i;
        return members[best_index];
    }
};

// Builds `capacity` maximal independent sets via randomized greedy fill plus
// one swap-search pass each.
inline Population init_population(const Graph& g, NodeID capacity, std::uint64_t seed) {
    if (capacity < 2) throw std::invalid_argument("population capacity must be at least 2");
    Rng root(seed);
    Population pop;
    pop.members.reserve(static_cast<std::size_t>(capacity));
    for (NodeID i = 0; i < capacity; ++i) {
        SearchState st(g, root.next_u64());
        greedy_maximalize(st, nullptr, /*random_ties=*/true);
        local_search_pass(st);
        pop.members.push_back(Individual{st.solution(), st.size()});
    }
    return pop;
}

// Two independent size-2 tournaments: higher fitness wins, ties decided by a
// coin flip. The same member may win both.
inline std::pair<std::size_t, std::size_t> select_parents(const Population& pop, Rng& rng) {
    auto tournament = [&]() {
        const std::size_t a = static_cast<std::size_t>(rng.next_below(pop.members.size()));
        const std::size_t b = static_cast<std::size_t>(rng.next_below(pop.members.size()));
        if (pop.members[a].fitness != pop.members[b].fitness)
            return pop.members[a].fitness > pop.members[b].fitness ? a : b;
        return rng.coin() ? a : b;
    };
    const std::size_t first = tournament();
    const std::size_t second = tournament();
    return {first, second};
}

// The crossover exchange: each child takes one parent's vertices inside
// block1 and the other parent's inside block2, dropping the separator. Both
// children are independent because no edge joins the blocks.
inline std::pair<VertexSet, VertexSet> exchange_children(const Individual& first,
                                                         const Individual& second,
                                                         const SeparatorDecomposition& d) {
    const NodeID n = first.solution.universe_size();
    VertexSet o1(n);
    VertexSet o2(n);
    d.block1.for_each([&](NodeID v) {
        if (first.solution.contains(v)) o1.insert(v);
        if (second.solution.contains(v)) o2.insert(v);
    });
    d.block2.for_each([&](NodeID v) {
        if (second.solution.contains(v)) o1.insert(v);
        if (first.solution.contains(v)) o2.insert(v);
    });
    return {o1, o2};
}

namespace detail {

// Finishes one exchanged child: greedy fill (only separator vertices and
// vertices free after the exchange can enter), then a swap search seeded
// with the solution vertices in and around the separator.
inline Individual finish_child(const Graph& g, const VertexSet& exchanged,
                               const SeparatorDecomposition& d, std::uint64_t seed) {
    SearchState st(g, seed);
    st.assign(exchanged);
    greedy_maximalize(st);
    d.separator.for_each([&](NodeID v) {
        if (st.in_solution(v)) st.enqueue(v);
        for (NodeID u : g.neighbors(v))
            if (st.in_solution(u)) st.enqueue(u);
    });
    local_search_pass(st);
    return Individual{st.solution(), st.size()};
}

}  // namespace detail

// Separator crossover: builds both exchanged children, completes each, and
// returns the fitter one.
inline Individual combine_separator(const Graph& g, const Individual& first,
                                    const Individual& second, const SeparatorDecomposition& d,
                                    std::uint64_t seed) {
    if (!is_valid_decomposition(g, d))
        throw InvalidDecomposition("combine: decomposition violates its invariants");
    auto [o1, o2] = exchange_children(first, second, d);
    Individual child1 = detail::finish_child(g, o1, d, mix_seed(seed));
    Individual child2 = detail::finish_child(g, o2, d, mix_seed(seed + 1));
    return child1.fitness >= child2.fitness ? child1 : child2;
}

// One perturbation plus a swap search; keeps the input child if the shaken
// result is strictly worse.
inline Individual mutate(const Graph& g, const Individual& child, std::uint64_t seed) {
    SearchState st(g, seed);
    st.assign(child.solution);
    perturb(st);
    local_search_pass(st);
    if (st.size() < child.fitness) return child;
    return Individual{st.solution(), st.size()};
}

// Replaces the population member most similar to the child (smallest
// symmetric difference, then lowest index) among those with fitness at most
// the child's. Returns the replaced index, or nothing if every member is
// strictly fitter.
inline std::optional<std::size_t> evict(Population& pop, const Individual& child) {
    std::optional<std::size_t> victim;
    NodeID best_distance = 0;
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
        if (pop.members[i].fitness > child.fitness) continue;
        const NodeID distance = pop.members[i].solution.symmetric_difference_size(child.solution);
        if (!victim || distance < best_distance) {
            victim = i;
            best_distance = distance;
        }
    }
    if (victim) pop.members[*victim] = child;
    return victim;
}

struct EvolveResult {
    Individual best;
    std::int64_t combine_count = 0;
};

// The evolutionary loop: tournament selection, separator crossover with
// decompositions drawn round-robin from the pool, mutation, similarity
// eviction. Stops after `mu` consecutive combines without improving the best
// (the streak resets only on strict improvement) or at the deadline.
// `on_improve` fires for the initial best and every strict improvement.
inline EvolveResult evolve(const Graph& g, const std::vector<SeparatorDecomposition>& pool,
                           NodeID capacity, std::int64_t mu, std::uint64_t seed,
                           const Deadline& deadline = {},
                           const std::function<void(const Individual&)>& on_improve = {}) {
    if (pool.empty()) throw std::invalid_argument("evolve: decomposition pool is empty");
    Rng rng(seed);
    Population pop = init_population(g, capacity, rng.next_u64());
    Individual best = pop.best();
    if (on_improve) on_improve(best);

    EvolveResult result;
    while (pop.unsuccessful_streak < mu) {
        if (deadline && Clock::now() >= *deadline) break;
        const auto [i1, i2] = select_parents(pop, rng);
        const SeparatorDecomposition& d =
            pool[static_cast<std::size_t>(result.combine_count) % pool.size()];
        Individual child =
            combine_separator(g, pop.members[i1], pop.members[i2], d, rng.next_u64());
        child = mutate(g, child, rng.next_u64());
        ++result.combine_count;
        if (child.fitness > best.fitness) {
            best = child;
            pop.unsuccessful_streak = 0;
            if (on_improve) on_improve(best);
        } else {
            ++pop.unsuccessful_streak;
        }
        evict(pop, child);
    }
    result.best = std::move(best);
    return result;
}

}  // namespace mis
