// Acceptance gate for the solver: nine independently checked claims about
// kernel exactness, reconstruction, end-to-end optimality, local-search
// optimality, separator validity, the perturbation law, kernel shrinkage at
// scale, and anytime/determinism behavior. Each claim prints exactly one
// PASS/FAIL line; the process exits 0 only if every claim holds.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mis/evolution.hpp"
#include "mis/graph.hpp"
#include "mis/kernel.hpp"
#include "mis/local_search.hpp"
#include "mis/partition.hpp"
#include "mis/rng.hpp"
#include "mis/solution_io.hpp"
#include "mis/solver.hpp"
#include "oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double uniform01(mis::Rng& rng) {
    return static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53;
}

bool report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("[%d/9] %s %s (%s)\n", index, pass ? "PASS" : "FAIL", name,
                detail.c_str());
    std::fflush(stdout);
    return pass;
}

mis::Graph small_random_graph(std::uint64_t seed, int n_lo, int n_hi) {
    mis::Rng rng(seed);
    const int n = n_lo + static_cast<int>(rng.next_below(
                             static_cast<std::uint64_t>(n_hi - n_lo + 1)));
    constexpr double kDensities[] = {0.1, 0.2, 0.3, 0.5};
    return oracle::erdos_renyi(n, kDensities[rng.next_below(4)], rng);
}

// ---------------------------------------------------------------------------
// 1 & 2: kernelization preserves the optimum and reconstruction recovers it.

struct KernelCorpusOutcome {
    int instances = 0;
    int offset_failures = 0;
    int restore_failures = 0;
    double elapsed_s = 0.0;
};

KernelCorpusOutcome run_kernel_corpus() {
    KernelCorpusOutcome out;
    const auto start = Clock::now();
    for (int i = 0; i < 2000; ++i) {
        const mis::Graph g = small_random_graph(900000 + i, 4, 16);
        const int alpha = oracle::max_is_size_dp(g);
        const auto kr = mis::kernelize(g);
        const int kernel_alpha = oracle::max_is_size_dp(kr.kernel);
        ++out.instances;
        if (alpha != kernel_alpha + static_cast<int>(kr.theta)) {
            ++out.offset_failures;
            continue;
        }
        mis::VertexSet kernel_solution(kr.kernel.num_vertices());
        const auto maxima = oracle::all_maximum_independent_sets(kr.kernel);
        if (!maxima.empty())
            for (mis::NodeID v : maxima.front()) kernel_solution.insert(v);
        const mis::VertexSet restored = mis::restore_solution(kr, kernel_solution);
        if (!mis::is_independent_set(g, restored) ||
            static_cast<int>(restored.size()) != alpha)
            ++out.restore_failures;
    }
    out.elapsed_s = seconds_since(start);
    return out;
}

// ---------------------------------------------------------------------------
// 3: the full solver is exact on tiny instances and always valid.

bool check_small_solves(std::string& detail) {
    int optimal = 0;
    int valid = 0;
    const int total = 200;
    for (int i = 0; i < total; ++i) {
        const mis::Graph g = small_random_graph(450000 + i, 2, 14);
        mis::SolverConfig cfg;
        cfg.seed = 450000 + static_cast<std::uint64_t>(i);
        cfg.mu = 100;
        cfg.time_limit_s = 2.0;
        const auto res = mis::solve(g, cfg);
        const bool is_valid = mis::is_independent_set(g, res.vertices) &&
                              static_cast<mis::NodeID>(res.vertices.size()) == res.size;
        valid += is_valid;
        optimal += is_valid && static_cast<int>(res.size) == oracle::max_is_size_dp(g);
    }
    std::ostringstream d;
    d << "optimal " << optimal << "/" << total << ", valid " << valid << "/" << total;
    detail = d.str();
    return valid == total && optimal * 100 >= total * 99;
}

// ---------------------------------------------------------------------------
// 4: families the reductions solve outright are solved exactly.

bool check_reduction_solvable(std::string& detail) {
    int forest_ok = 0;
    for (int i = 0; i < 50; ++i) {
        mis::Rng rng(610000 + i);
        const int n = 1 + static_cast<int>(rng.next_below(1000));
        const mis::Graph g = oracle::random_forest(n, 0.02 + 0.2 * uniform01(rng), rng);
        mis::SolverConfig cfg;
        cfg.seed = 610000 + static_cast<std::uint64_t>(i);
        cfg.time_limit_s = 5.0;
        const auto res = mis::solve(g, cfg);
        forest_ok += mis::is_independent_set(g, res.vertices) &&
                     static_cast<std::int64_t>(res.size) == oracle::max_is_size_forest(g);
    }
    int composite_ok = 0;
    for (int i = 0; i < 50; ++i) {
        mis::Rng rng(620000 + i);
        const int n = 30 + static_cast<int>(rng.next_below(400));
        const auto instance = oracle::reduction_solvable_instance(n, rng);
        mis::SolverConfig cfg;
        cfg.seed = 620000 + static_cast<std::uint64_t>(i);
        cfg.time_limit_s = 5.0;
        const auto res = mis::solve(instance.graph, cfg);
        composite_ok += res.first_kernel_size == 0 &&
                        mis::is_independent_set(instance.graph, res.vertices) &&
                        static_cast<std::int64_t>(res.size) == instance.alpha;
    }
    std::ostringstream d;
    d << "forests " << forest_ok << "/50, fully reducible graphs " << composite_ok
      << "/50";
    detail = d.str();
    return forest_ok == 50 && composite_ok == 50;
}

// ---------------------------------------------------------------------------
// 5: after a local-search pass no free vertex and no (1,2)-swap remains.
// The scan below recomputes tightness from scratch; it shares no state with
// the search implementation.

bool improvement_exists(const mis::Graph& g, const mis::VertexSet& s) {
    const mis::NodeID n = g.num_vertices();
    std::vector<int> tightness(static_cast<std::size_t>(n), 0);
    for (mis::NodeID v = 0; v < n; ++v) {
        if (!s.contains(v)) continue;
        for (mis::NodeID u : g.neighbors(v)) ++tightness[static_cast<std::size_t>(u)];
    }
    for (mis::NodeID v = 0; v < n; ++v)
        if (!s.contains(v) && tightness[static_cast<std::size_t>(v)] == 0)
            return true;  // not even maximal
    for (mis::NodeID x = 0; x < n; ++x) {
        if (!s.contains(x)) continue;
        std::vector<mis::NodeID> loose;
        for (mis::NodeID u : g.neighbors(x))
            if (!s.contains(u) && tightness[static_cast<std::size_t>(u)] == 1)
                loose.push_back(u);
        for (std::size_t a = 0; a < loose.size(); ++a)
            for (std::size_t b = a + 1; b < loose.size(); ++b) {
                const auto nb = g.neighbors(loose[a]);
                if (!std::binary_search(nb.begin(), nb.end(), loose[b])) return true;
            }
    }
    return false;
}

bool check_local_optimality(std::string& detail) {
    int clean = 0;
    const int total = 500;
    for (int i = 0; i < total; ++i) {
        mis::Rng rng(530000 + i);
        const int n = 1 + static_cast<int>(rng.next_below(200));
        const double target_degree = 1.0 + 7.0 * uniform01(rng);
        const double p = n > 1 ? std::min(1.0, target_degree / (n - 1)) : 0.0;
        const mis::Graph g = oracle::erdos_renyi(n, p, rng);
        mis::SearchState st(g, rng.next_u64());
        std::vector<mis::NodeID> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order.begin(), order.end());
        for (mis::NodeID v : order)
            if (st.is_free(v) && rng.coin()) st.insert(v);
        mis::local_search_pass(st);
        clean += !improvement_exists(g, st.solution());
    }
    std::ostringstream d;
    d << "no residual improvement on " << clean << "/" << total << " instances";
    detail = d.str();
    return clean == total;
}

// ---------------------------------------------------------------------------
// 6: node separators partition the graph, cut all cross edges, and balance.

bool decomposition_valid(const mis::Graph& g, const mis::SeparatorDecomposition& d) {
    const mis::NodeID n = g.num_vertices();
    for (mis::NodeID v = 0; v < n; ++v) {
        const int member = d.block1.contains(v) + d.block2.contains(v) +
                           d.separator.contains(v);
        if (member != 1) return false;
    }
    for (mis::NodeID v = 0; v < n; ++v) {
        if (!d.block1.contains(v)) continue;
        for (mis::NodeID u : g.neighbors(v))
            if (d.block2.contains(u)) return false;
    }
    if (n > 2) {
        const double limit =
            std::floor((1.0 + d.epsilon) * std::ceil(n / 2.0) + 1e-9);
        if (d.block1.size() > limit || d.block2.size() > limit) return false;
    }
    return true;
}

bool check_separators(std::string& detail) {
    int valid = 0;
    const int total = 1000;
    for (int i = 0; i < total; ++i) {
        mis::Rng rng(700000 + i);
        mis::Graph g = [&] {
            switch (i % 3) {
                case 0:
                    return oracle::grid_graph(2 + static_cast<int>(rng.next_below(9)),
                                              2 + static_cast<int>(rng.next_below(9)));
                case 1:
                    return oracle::cycle_graph(3 + static_cast<int>(rng.next_below(58)));
                default: {
                    const int n = 1 + static_cast<int>(rng.next_below(80));
                    const double p =
                        n > 1 ? std::min(1.0, (1.0 + 5.0 * uniform01(rng)) / (n - 1)) : 0.0;
                    return oracle::erdos_renyi(n, p, rng);
                }
            }
        }();
        const auto d = mis::node_separator(g, 0.25, 700000 + i);
        valid += decomposition_valid(g, d);
    }
    std::ostringstream d;
    d << valid << "/" << total << " decompositions valid";
    detail = d.str();
    return valid == total;
}

// ---------------------------------------------------------------------------
// 7: the perturbation force count equals 1 half the time.

bool check_force_distribution(std::string& detail) {
    mis::Rng rng(31337);
    const int total = 100000;
    int ones = 0;
    for (int i = 0; i < total; ++i)
        ones += mis::sample_force_count(rng, 1 << 30) == 1;
    const double freq = static_cast<double>(ones) / total;
    std::ostringstream d;
    d << "P(f=1) = " << freq << ", bound 0.5 +/- 0.01";
    detail = d.str();
    return std::abs(freq - 0.5) <= 0.01;
}

// ---------------------------------------------------------------------------
// 8: on a 100k-vertex road-shaped graph the kernel is >= 10x smaller.

bool check_kernel_shrinkage(std::string& detail) {
    mis::Rng rng(5);
    const mis::Graph g = oracle::road_like_graph(40, 104000, rng);
    const auto start = Clock::now();
    const auto kr = mis::kernelize(g);
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << "n=" << g.num_vertices() << " kernel=" << kr.kernel.num_vertices() << " in "
      << elapsed << "s";
    detail = d.str();
    return g.num_vertices() >= 100000 &&
           kr.kernel.num_vertices() * 10 <= g.num_vertices() && elapsed < 30.0;
}

// ---------------------------------------------------------------------------
// 9: improvement logs rise strictly and equal seeds give identical output.

bool check_anytime_determinism(std::string& detail) {
    int ok = 0;
    const int total = 20;
    for (int i = 0; i < total; ++i) {
        const mis::Graph g = small_random_graph(810000 + i, 10, 60);
        mis::SolverConfig cfg;
        cfg.seed = 810000 + static_cast<std::uint64_t>(i);
        cfg.time_limit_s = 1.0;
        cfg.mu = 150;
        cfg.population = 12;
        cfg.pool_size = 4;
        const auto first = mis::solve(g, cfg);
        const auto second = mis::solve(g, cfg);

        bool rising = true;
        for (std::size_t k = 1; k < first.improvements.size(); ++k)
            rising &= first.improvements[k].size > first.improvements[k - 1].size;

        bool identical = first.improvements.size() == second.improvements.size();
        for (std::size_t k = 0; identical && k < first.improvements.size(); ++k)
            identical = first.improvements[k].size == second.improvements[k].size &&
                        first.improvements[k].level == second.improvements[k].level;
        std::ostringstream out1, out2;
        mis::write_solution(out1, first.vertices);
        mis::write_solution(out2, second.vertices);
        identical = identical && out1.str() == out2.str();

        ok += rising && identical && mis::is_independent_set(g, first.vertices);
    }
    std::ostringstream d;
    d << ok << "/" << total << " instances monotone and reproducible";
    detail = d.str();
    return ok == total;
}

}  // namespace

int main() {
    bool all = true;

    const auto corpus = run_kernel_corpus();
    {
        std::ostringstream d;
        d << corpus.instances - corpus.offset_failures << "/" << corpus.instances
          << " exact offsets in " << corpus.elapsed_s << "s, bound 60s";
        all &= report(1, "kernelization preserves the optimum",
                      corpus.offset_failures == 0 && corpus.elapsed_s < 60.0, d.str());
    }
    {
        std::ostringstream d;
        d << corpus.instances - corpus.offset_failures - corpus.restore_failures << "/"
          << corpus.instances - corpus.offset_failures
          << " optimal kernel solutions restored to optimal full solutions";
        all &= report(2, "reconstruction recovers a maximum solution",
                      corpus.restore_failures == 0, d.str());
    }
    {
        std::string d;
        const bool pass = check_small_solves(d);
        all &= report(3, "solver is exact on small instances", pass, d);
    }
    {
        std::string d;
        const bool pass = check_reduction_solvable(d);
        all &= report(4, "reduction-solvable families solved exactly", pass, d);
    }
    {
        std::string d;
        const bool pass = check_local_optimality(d);
        all &= report(5, "local search leaves no two-for-one swap", pass, d);
    }
    {
        std::string d;
        const bool pass = check_separators(d);
        all &= report(6, "node separators are valid decompositions", pass, d);
    }
    {
        std::string d;
        const bool pass = check_force_distribution(d);
        all &= report(7, "perturbation force count is 1 half the time", pass, d);
    }
    {
        std::string d;
        const bool pass = check_kernel_shrinkage(d);
        all &= report(8, "road-like graph kernel shrinks tenfold", pass, d);
    }
    {
        std::string d;
        const bool pass = check_anytime_determinism(d);
        all &= report(9, "anytime log is monotone and runs are reproducible", pass, d);
    }

    std::printf("%s\n", all ? "ACCEPTANCE: all 9 criteria passed"
                            : "ACCEPTANCE: at least one criterion failed");
    return all ? 0 : 1;
}
