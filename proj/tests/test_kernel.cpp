#include <catch2/catch_amalgamated.hpp>

#include "mis/graph.hpp"
#include "mis/kernel.hpp"
#include "mis/rng.hpp"
#include "oracles.hpp"

using mis::Graph;
using mis::KernelState;
using mis::NodeID;
using mis::VertexSet;

namespace {

VertexSet set_of(NodeID universe, std::initializer_list<NodeID> vs) {
    VertexSet s(universe);
    for (NodeID v : vs) s.insert(v);
    return s;
}

// Checks the full pipeline on one graph against the subset oracle: size
// identity, reconstruction validity for every maximum kernel solution.
void check_exact(const Graph& g) {
    const int alpha = oracle::max_is_size_dp(g);
    const auto red = mis::kernelize(g);
    const int kernel_alpha =
        red.kernel.num_vertices() == 0 ? 0 : oracle::max_is_size_dp(red.kernel);
    INFO("n=" << g.num_vertices() << " m=" << g.num_edges()
              << " kernel=" << red.kernel.num_vertices() << " theta=" << red.theta);
    REQUIRE(red.theta + kernel_alpha == alpha);

    const auto kernel_sets = oracle::all_maximum_independent_sets(red.kernel);
    for (const auto& ks : kernel_sets) {
        VertexSet kernel_sol(red.kernel.num_vertices());
        for (NodeID v : ks) kernel_sol.insert(v);
        const VertexSet restored = mis::restore_solution(red, kernel_sol);
        REQUIRE(mis::is_independent_set(g, restored));
        REQUIRE(restored.size() == alpha);
    }
}

}  // namespace

// ------------------------------------------------------------ pendant rule

TEST_CASE("pendant: single edge leaves one vertex in the solution") {
    KernelState st(oracle::path_graph(2));
    REQUIRE(mis::reduce_pendant(st));
    REQUIRE(st.alive_count() == 0);
    REQUIRE(st.theta() == 1);
}

TEST_CASE("pendant: star includes every leaf") {
    KernelState st(oracle::complete_bipartite(1, 5));
    REQUIRE(mis::reduce_pendant(st));
    REQUIRE(st.alive_count() == 0);
    REQUIRE(st.theta() == 5);
    REQUIRE_FALSE(st.in_solution(0));  // center stays out
    for (NodeID leaf = 1; leaf <= 5; ++leaf) REQUIRE(st.in_solution(leaf));
}

TEST_CASE("pendant: path cascade") {
    KernelState st(oracle::path_graph(4));
    REQUIRE(mis::reduce_pendant(st));
    REQUIRE(st.alive_count() == 0);
    REQUIRE(st.theta() == 2);
}

TEST_CASE("pendant: includes isolated vertices") {
    KernelState st(Graph::from_edge_list(3, {{0, 1}}));
    REQUIRE(mis::reduce_pendant(st));
    REQUIRE(st.theta() == 2);
    REQUIRE(st.in_solution(2));
}

// --------------------------------------------------------------- fold rule

TEST_CASE("fold: short path folds to one isolated gadget") {
    KernelState st(oracle::path_graph(3));
    REQUIRE(mis::reduce_fold(st));
    REQUIRE(st.theta() == 1);
    REQUIRE(st.alive_count() == 1);
    REQUIRE(st.is_alive(3));  // fresh gadget id past the base ids
    REQUIRE(st.degree(3) == 0);
    REQUIRE(mis::reduce_pendant(st));
    REQUIRE(st.theta() == 2);
}

TEST_CASE("fold: 4-cycle folds to a single edge, both restores valid") {
    const Graph g = oracle::cycle_graph(4);
    KernelState st(g);
    REQUIRE(mis::reduce_fold(st));
    REQUIRE(st.alive_count() == 2);
    REQUIRE(st.theta() == 1);

    mis::KernelizeResult red;
    auto [kernel, map] = st.effective_graph();
    red.kernel = kernel;
    red.map = map;
    red.theta = st.theta();
    red.log = st.log();
    red.base_vertices = st.base_vertices();
    red.state_capacity = st.capacity();
    REQUIRE(red.kernel.num_vertices() == 2);
    REQUIRE(red.kernel.num_edges() == 1);

    for (NodeID pick = 0; pick < 2; ++pick) {
        const VertexSet restored = mis::restore_solution(red, set_of(2, {pick}));
        REQUIRE(mis::is_independent_set(g, restored));
        REQUIRE(restored.size() == 2);
    }
}

TEST_CASE("fold: triangle is not foldable") {
    KernelState st(oracle::complete_graph(3));
    REQUIRE_FALSE(mis::reduce_fold(st));
    REQUIRE(st.alive_count() == 3);
    REQUIRE(st.theta() == 0);
}

// ----------------------------------------------------------------- lp rule

TEST_CASE("lp: 4-cycle is fully half-integral, no change") {
    KernelState st(oracle::cycle_graph(4));
    REQUIRE_FALSE(mis::reduce_lp(st));
    REQUIRE(st.alive_count() == 4);
}

TEST_CASE("lp: star leaves get value one") {
    KernelState st(oracle::complete_bipartite(1, 3));
    REQUIRE(mis::reduce_lp(st));
    REQUIRE(st.theta() == 3);
    REQUIRE(st.alive_count() == 0);
    REQUIRE_FALSE(st.in_solution(0));
    for (NodeID leaf = 1; leaf <= 3; ++leaf) REQUIRE(st.in_solution(leaf));
}

TEST_CASE("lp: edgeless graph is taken whole") {
    KernelState st(Graph::from_edge_list(4, {}));
    REQUIRE(mis::reduce_lp(st));
    REQUIRE(st.theta() == 4);
    REQUIRE(st.alive_count() == 0);
}

TEST_CASE("lp: includes are exact on random bipartite-ish graphs") {
    mis::Rng rng(4001);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(2, 14));
        const Graph g = oracle::erdos_renyi(n, 0.25, rng);
        KernelState st(g);
        mis::reduce_lp(st);
        // theta plus the optimum of what remains must equal the optimum
        auto [kernel, map] = st.effective_graph();
        REQUIRE(st.theta() + oracle::max_is_size_dp(kernel) == oracle::max_is_size_dp(g));
    }
}

// --------------------------------------------------------- unconfined rule

TEST_CASE("unconfined: triangle collapses to one solution vertex") {
    KernelState st(oracle::complete_graph(3));
    REQUIRE(mis::reduce_unconfined(st));
    REQUIRE(mis::reduce_pendant(st));
    REQUIRE(st.alive_count() == 0);
    REQUIRE(st.theta() == 1);
}

TEST_CASE("unconfined: edgeless graph untouched") {
    KernelState st(Graph::from_edge_list(5, {}));
    REQUIRE_FALSE(mis::reduce_unconfined(st));
    REQUIRE(st.alive_count() == 5);
}

TEST_CASE("unconfined: 4-cycle vertices are all confined") {
    KernelState st(oracle::cycle_graph(4));
    REQUIRE_FALSE(mis::reduce_unconfined(st));
}

TEST_CASE("unconfined: exclusion records a packing constraint on the neighborhood") {
    KernelState st(oracle::complete_graph(3));
    REQUIRE(mis::reduce_unconfined(st));
    bool found = false;
    for (const auto& c : st.packing_constraints())
        if (c.variables.size() == static_cast<std::size_t>(c.bound) + 1) found = true;
    REQUIRE(found);  // at least one "one neighbor must join" constraint existed
}

// --------------------------------------------------------------- twin rule

TEST_CASE("twin: complete bipartite 3x3 resolves exactly") {
    const Graph g = oracle::complete_bipartite(3, 3);
    check_exact(g);
    const auto red = mis::kernelize(g);
    REQUIRE(red.stats.twin_fires >= 1);
    REQUIRE(red.kernel.num_vertices() == 0);
    REQUIRE(red.theta == 3);
}

TEST_CASE("twin: shared neighborhood with an edge includes both twins") {
    const Graph g = Graph::from_edge_list(
        8, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {4, 5}, {5, 6}, {6, 7}});
    KernelState st(g);
    REQUIRE(mis::reduce_twin(st));
    REQUIRE(st.in_solution(0));
    REQUIRE(st.in_solution(1));
    REQUIRE(st.theta() == 2);
    REQUIRE(st.stats().twin_fires == 1);
    check_exact(g);
}

TEST_CASE("twin: gadget branch restores either the twins or the neighborhood") {
    const Graph g = oracle::complete_bipartite(3, 3);
    KernelState st(g);
    REQUIRE(mis::reduce_twin(st));
    REQUIRE(st.theta() == 2);
    // gadget vertex adjacent to u's two-neighborhood (the third left vertex)
    const NodeID gadget = 6;
    REQUIRE(st.is_alive(gadget));
    REQUIRE(st.degree(gadget) == 1);
}

TEST_CASE("twin: no degree-3 twins in a 6-cycle") {
    KernelState st(oracle::cycle_graph(6));
    REQUIRE_FALSE(mis::reduce_twin(st));
}

// -------------------------------------------------------- alternative rule

TEST_CASE("alternative: funnel with triangle neighborhood, 6-vertex witness") {
    const Graph g = Graph::from_edge_list(
        6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {2, 3}, {2, 4}, {3, 4}, {1, 5}, {2, 5}});
    KernelState st(g);
    REQUIRE(mis::reduce_alternative(st));
    REQUIRE(st.stats().alternative_fires >= 1);
    check_exact(g);
}

TEST_CASE("alternative: trivial funnel on a 3-path") {
    const Graph g = oracle::path_graph(3);
    KernelState st(g);
    REQUIRE(mis::reduce_alternative(st));
    check_exact(g);
}

TEST_CASE("alternative: 4-cycle case needs degree three") {
    KernelState st(oracle::cycle_graph(4));
    REQUIRE_FALSE(mis::detail::apply_first_four_cycle(st));
}

TEST_CASE("alternative: tight chordless 4-cycle witness, both restores valid") {
    // cycle 0-1-2-3 with outside vertices 4 (adjacent to the 0/2 side) and
    // 5 (adjacent to the 1/3 side)
    const Graph g = Graph::from_edge_list(
        6, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 0}, {4, 2}, {5, 1}, {5, 3}});
    KernelState st(g);
    REQUIRE(mis::detail::apply_first_four_cycle(st));
    REQUIRE(st.theta() == 2);
    REQUIRE(st.alive_count() == 2);
    REQUIRE(st.has_live_edge(4, 5));  // overlay edge committing to a side

    mis::KernelizeResult red;
    auto [kernel, map] = st.effective_graph();
    red.kernel = kernel;
    red.map = map;
    red.theta = st.theta();
    red.log = st.log();
    red.base_vertices = st.base_vertices();
    red.state_capacity = st.capacity();
    for (NodeID pick = 0; pick < 2; ++pick) {
        const VertexSet restored = mis::restore_solution(red, set_of(2, {pick}));
        REQUIRE(mis::is_independent_set(g, restored));
        REQUIRE(restored.size() == 3);  // alpha of the witness
    }
    REQUIRE(oracle::max_is_size_dp(g) == 3);
}

// ------------------------------------------------------------ packing rule

TEST_CASE("packing: zero-bound constraint over one vertex includes it") {
    KernelState st(oracle::path_graph(4));
    st.add_packing_constraint({3}, 0);
    REQUIRE(mis::reduce_packing_simple(st));
    REQUIRE(st.in_solution(3));
    REQUIRE(st.theta() == 1);
}

TEST_CASE("packing: zero-bound edgeless set is taken whole") {
    KernelState st(oracle::cycle_graph(4));
    st.add_packing_constraint({0, 2}, 0);
    REQUIRE(mis::reduce_packing_simple(st));
    REQUIRE(st.theta() == 2);
    REQUIRE(st.alive_count() == 0);
    REQUIRE(st.in_solution(0));
    REQUIRE(st.in_solution(2));
}

TEST_CASE("packing: zero-bound set spanning an edge is reported infeasible") {
    KernelState st(oracle::cycle_graph(4));
    st.add_packing_constraint({0, 1}, 0);
    REQUIRE_FALSE(mis::reduce_packing_simple(st));
    REQUIRE(st.stats().infeasible_packing == 1);
    REQUIRE(st.alive_count() == 4);
    REQUIRE(st.theta() == 0);
}

TEST_CASE("packing: no zero-bound constraints means no change") {
    KernelState st(oracle::cycle_graph(4));
    st.add_packing_constraint({0, 2}, 1);
    REQUIRE_FALSE(mis::reduce_packing_simple(st));
}

// ----------------------------------------------------------- full pipeline

TEST_CASE("kernelize: known small graphs") {
    SECTION("5-cycle gives an empty kernel with theta two") {
        const auto red = mis::kernelize(oracle::cycle_graph(5));
        REQUIRE(red.kernel.num_vertices() == 0);
        REQUIRE(red.theta == 2);
    }
    SECTION("petersen-like 3-regular graph keeps the size identity") {
        const Graph g = Graph::from_edge_list(
            10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0},   // outer cycle
                 {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5},   // inner star
                 {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9}}); // spokes
        check_exact(g);
    }
    SECTION("empty graph") {
        const auto red = mis::kernelize(Graph::from_edge_list(0, {}));
        REQUIRE(red.kernel.num_vertices() == 0);
        REQUIRE(red.theta == 0);
    }
}

TEST_CASE("kernelize: forests reduce to nothing and match the tree oracle") {
    mis::Rng rng(4100);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 200));
        const Graph g = oracle::random_forest(n, 0.15, rng);
        const auto red = mis::kernelize(g);
        REQUIRE(red.kernel.num_vertices() == 0);
        REQUIRE(red.theta == oracle::max_is_size_forest(g));
        const VertexSet sol = mis::restore_solution(red, VertexSet(0));
        REQUIRE(mis::is_independent_set(g, sol));
        REQUIRE(sol.size() == red.theta);
    }
}

TEST_CASE("kernelize: exact on a random corpus with full restore checks") {
    mis::Rng rng(4200);
    const double probs[] = {0.1, 0.2, 0.3, 0.5};
    for (int trial = 0; trial < 400; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(4, 16));
        const double p = probs[rng.next_below(4)];
        check_exact(oracle::erdos_renyi(n, p, rng));
    }
}

TEST_CASE("kernelize: closed-form mixed instances are fully solved") {
    mis::Rng rng(4300);
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = oracle::reduction_solvable_instance(60, rng);
        const auto red = mis::kernelize(inst.graph);
        REQUIRE(red.kernel.num_vertices() == 0);
        REQUIRE(red.theta == inst.alpha);
        const VertexSet sol = mis::restore_solution(red, VertexSet(0));
        REQUIRE(mis::is_independent_set(inst.graph, sol));
        REQUIRE(sol.size() == inst.alpha);
    }
}

TEST_CASE("kernelize: theta plus effective optimum is invariant along the run") {
    mis::Rng rng(4400);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(4, 12));
        const Graph g = oracle::erdos_renyi(n, 0.3, rng);
        const int alpha = oracle::max_is_size_dp(g);
        int observations = 0;
        mis::kernelize(g, [&](const KernelState& st) {
            auto [eff, map] = st.effective_graph();
            REQUIRE(st.theta() + oracle::max_is_size_dp(eff) == alpha);
            ++observations;
        });
        if (g.num_edges() > 0) REQUIRE(observations >= 1);
    }
}

TEST_CASE("kernelize: rules returning false leave the state unchanged") {
    mis::Rng rng(4500);
    using Rule = bool (*)(KernelState&);
    const Rule rules[] = {&mis::reduce_pendant, &mis::reduce_fold,
                          &mis::reduce_lp,     &mis::reduce_unconfined,
                          &mis::reduce_twin,   &mis::reduce_alternative,
                          &mis::reduce_packing_simple};
    for (int trial = 0; trial < 40; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(2, 12));
        const Graph g = oracle::erdos_renyi(n, 0.3, rng);
        KernelState st(g);
        for (const Rule rule : rules) {
            const auto before_theta = st.theta();
            const auto before_log = st.log().size();
            const auto before_alive = st.alive_count();
            auto [before_graph, m1] = st.effective_graph();
            if (!rule(st)) {
                auto [after_graph, m2] = st.effective_graph();
                REQUIRE(st.theta() == before_theta);
                REQUIRE(st.log().size() == before_log);
                REQUIRE(st.alive_count() == before_alive);
                REQUIRE(after_graph.num_vertices() == before_graph.num_vertices());
                REQUIRE(after_graph.num_edges() == before_graph.num_edges());
            }
        }
    }
}

TEST_CASE("kernelize: deterministic across repeated runs") {
    mis::Rng rng(4600);
    for (int trial = 0; trial < 10; ++trial) {
        const Graph g = oracle::erdos_renyi(14, 0.3, rng);
        const auto a = mis::kernelize(g);
        const auto b = mis::kernelize(g);
        REQUIRE(a.theta == b.theta);
        REQUIRE(a.log.size() == b.log.size());
        REQUIRE(a.kernel.num_vertices() == b.kernel.num_vertices());
        REQUIRE(a.kernel.num_edges() == b.kernel.num_edges());
    }
}

TEST_CASE("restore_solution rejects bad kernel solutions") {
    const Graph g = oracle::cycle_graph(4);
    KernelState st(g);
    REQUIRE(mis::reduce_fold(st));
    mis::KernelizeResult red;
    auto [kernel, map] = st.effective_graph();
    red.kernel = kernel;
    red.map = map;
    red.theta = st.theta();
    red.log = st.log();
    red.base_vertices = st.base_vertices();
    red.state_capacity = st.capacity();

    REQUIRE_THROWS_AS(mis::restore_solution(red, set_of(2, {0, 1})),  // adjacent pair
                      mis::InvalidKernelSolution);
    REQUIRE_THROWS_AS(mis::restore_solution(red, set_of(7, {0})),  // wrong universe
                      mis::InvalidKernelSolution);
}
