#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mis/evolution.hpp"
#include "mis/graph.hpp"
#include "mis/graph_io.hpp"
#include "mis/kernel.hpp"
#include "mis/local_search.hpp"
#include "mis/partition.hpp"
#include "mis/rng.hpp"
#include "mis/solution_io.hpp"
#include "mis/solver.hpp"

namespace {

struct RunConfig {
    std::string input_path;
    std::string format = "metis";
    std::uint64_t seed = 0;
    double time_limit_s = 10.0;
    std::int64_t mu = 1000;
    double lambda_fraction = 0.1;
    int population = 50;
    double epsilon = 0.25;
    int pool = 16;
    std::string mode = "redumis";
    std::string output_path;
    std::string convergence_path;
    bool verify = false;
};

// exit 2 on anything the flags allow syntactically but the run cannot use
bool config_valid(const RunConfig& cfg, std::string& why) {
    if (cfg.time_limit_s <= 0.0) why = "--time-limit must be positive";
    else if (cfg.lambda_fraction <= 0.0 || cfg.lambda_fraction > 1.0)
        why = "--lambda must be in (0, 1]";
    else if (cfg.population < 2) why = "--population must be at least 2";
    else if (cfg.epsilon < 0.0 || cfg.epsilon > 1.0) why = "--epsilon must be in [0, 1]";
    else if (cfg.pool < 1) why = "--pool must be at least 1";
    else if (cfg.mu < 1) why = "--mu must be at least 1";
    else return true;
    return false;
}

struct RunOutcome {
    mis::VertexSet best;
    std::vector<mis::ImprovementPoint> improvements;
    mis::NodeID kernel_size = 0;
    std::int64_t theta = 0;
    double found_at = 0.0;
    int level = 0;
    int depth = 0;
};

RunOutcome run_redumis(const mis::Graph& g, const RunConfig& cfg) {
    mis::SolverConfig sc;
    sc.seed = cfg.seed;
    sc.time_limit_s = cfg.time_limit_s;
    sc.mu = cfg.mu;
    sc.lambda_fraction = cfg.lambda_fraction;
    sc.population = cfg.population;
    sc.epsilon = cfg.epsilon;
    sc.pool_size = cfg.pool;
    const auto result = mis::solve(g, sc);
    RunOutcome out;
    out.best = result.vertices;
    out.improvements = result.improvements;
    out.kernel_size = result.first_kernel_size;
    out.theta = result.first_kernel_theta;
    out.found_at = result.found_at;
    out.level = result.level;
    out.depth = result.depth_reached;
    return out;
}

RunOutcome run_kernel_only(const mis::Graph& g, const RunConfig& cfg) {
    const auto start = mis::Clock::now();
    const auto red = mis::kernelize(g);
    // complete the kernel greedily so the output is a full valid solution
    mis::SearchState st(red.kernel, cfg.seed);
    mis::greedy_maximalize(st);
    RunOutcome out;
    out.best = mis::restore_solution(red, st.solution());
    out.kernel_size = red.kernel.num_vertices();
    out.theta = red.theta;
    out.found_at = std::chrono::duration<double>(mis::Clock::now() - start).count();
    out.level = 1;
    out.depth = 1;
    out.improvements.push_back({out.found_at, out.best.size(), 1});
    return out;
}

RunOutcome run_evomis(const mis::Graph& g, const RunConfig& cfg) {
    const auto start = mis::Clock::now();
    const auto cutoff = start + std::chrono::duration_cast<mis::Clock::duration>(
                                    std::chrono::duration<double>(cfg.time_limit_s));
    auto elapsed = [&] {
        return std::chrono::duration<double>(mis::Clock::now() - start).count();
    };
    RunOutcome out;
    out.kernel_size = g.num_vertices();
    out.depth = 1;
    out.level = 1;
    const auto pool =
        mis::build_separator_pool(g, cfg.epsilon, cfg.pool, mis::mix_seed(cfg.seed));
    const auto result =
        mis::evolve(g, pool, cfg.population, cfg.mu, mis::mix_seed(cfg.seed + 1),
                    mis::Deadline{cutoff}, [&](const mis::Individual& best) {
                        out.improvements.push_back({elapsed(), best.fitness, 1});
                    });
    out.best = result.best.solution;
    out.found_at = out.improvements.empty() ? elapsed() : out.improvements.back().t_seconds;
    return out;
}

RunOutcome run_arw(const mis::Graph& g, const RunConfig& cfg) {
    const auto start = mis::Clock::now();
    const auto cutoff = start + std::chrono::duration_cast<mis::Clock::duration>(
                                    std::chrono::duration<double>(cfg.time_limit_s));
    auto elapsed = [&] {
        return std::chrono::duration<double>(mis::Clock::now() - start).count();
    };
    RunOutcome out;
    out.kernel_size = g.num_vertices();
    out.depth = 1;
    out.level = 1;
    mis::SearchState st(g, cfg.seed);
    mis::greedy_maximalize(st);
    mis::local_search_pass(st);
    out.best = st.solution();
    out.found_at = elapsed();
    out.improvements.push_back({out.found_at, out.best.size(), 1});
    while (mis::Clock::now() < cutoff) {
        mis::perturb(st);
        mis::local_search_pass(st);
        if (st.size() > out.best.size()) {
            out.best = st.solution();
            out.found_at = elapsed();
            out.improvements.push_back({out.found_at, out.best.size(), 1});
        }
    }
    return out;
}

int run(const RunConfig& cfg) {
    mis::Graph g;
    try {
        g = mis::load_graph_file(cfg.input_path, cfg.format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << cfg.input_path << ": " << e.what() << '\n';
        return 1;
    }

    RunOutcome out;
    if (cfg.mode == "redumis") out = run_redumis(g, cfg);
    else if (cfg.mode == "kernel-only") out = run_kernel_only(g, cfg);
    else if (cfg.mode == "evomis") out = run_evomis(g, cfg);
    else out = run_arw(g, cfg);

    if (!mis::is_independent_set(g, out.best)) {
        std::cerr << "error: computed solution failed the independence check\n";
        return 1;
    }

    try {
        if (!cfg.output_path.empty()) mis::write_solution_file(cfg.output_path, out.best);
        if (!cfg.convergence_path.empty()) {
            std::ofstream conv(cfg.convergence_path);
            if (!conv)
                throw mis::GraphError("cannot open " + cfg.convergence_path + " for writing");
            mis::write_convergence(conv, out.improvements);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (cfg.verify) {
        try {
            const mis::Graph fresh = mis::load_graph_file(cfg.input_path, cfg.format);
            mis::VertexSet check(fresh.num_vertices());
            if (!cfg.output_path.empty()) {
                std::ifstream in(cfg.output_path);
                if (!in) throw mis::GraphError("cannot reopen " + cfg.output_path);
                for (mis::NodeID v : mis::read_solution(in)) check.insert(v);
            } else {
                check = out.best;
            }
            if (check.size() != out.best.size() || !mis::is_independent_set(fresh, check)) {
                std::cerr << "error: verification failed\n";
                return 1;
            }
        } catch (const std::exception& e) {
            std::cerr << "error: verification failed: " << e.what() << '\n';
            return 1;
        }
    }

    std::cout << "mode=" << cfg.mode << " n=" << g.num_vertices() << " m=" << g.num_edges()
              << " kernel=" << out.kernel_size << " theta=" << out.theta
              << " best=" << out.best.size() << " found_at=" << out.found_at
              << " level=" << out.level << " depth=" << out.depth << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Maximum independent set solver: exact reductions, evolutionary search, "
                 "and iterated local search"};
    app.add_option("--input", cfg.input_path, "graph file to solve")->required();
    app.add_option("--format", cfg.format, "input format: metis or edgelist")
        ->check(CLI::IsMember({"metis", "edgelist"}));
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--time-limit", cfg.time_limit_s, "time limit in seconds");
    app.add_option("--mu", cfg.mu, "unsuccessful combines before the evolutionary phase stops");
    app.add_option("--lambda", cfg.lambda_fraction,
                   "fraction of the intermediate solution fixed between levels");
    app.add_option("--population", cfg.population, "evolutionary population size");
    app.add_option("--epsilon", cfg.epsilon, "partition imbalance fraction");
    app.add_option("--pool", cfg.pool, "separator decompositions per pool");
    app.add_option("--mode", cfg.mode, "redumis, evomis, arw, or kernel-only")
        ->check(CLI::IsMember({"redumis", "evomis", "arw", "kernel-only"}));
    app.add_option("--output", cfg.output_path, "write the best solution here");
    app.add_option("--convergence", cfg.convergence_path, "write improvement tuples here");
    app.add_flag("--verify", cfg.verify, "re-check the result against a fresh graph load");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    std::string why;
    if (!config_valid(cfg, why)) {
        std::cerr << "error: " << why << '\n';
        return 2;
    }
    return run(cfg);
}
