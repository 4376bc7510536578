// ddps — directed-network projected subgradient toolkit.
//
// Subcommands:
//   gen-graph       write a random strongly connected digraph as an edge list
//   run             execute a config-driven solver run, emit the trace CSV
//   analyze-matrix  mixing-matrix convergence diagnostics for a graph file
//   rate            fit the gap-decay envelope on an existing trace CSV
//
// Exit codes: 0 success, 1 config/input error, 2 numerical abort.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ddps/config.hpp"
#include "ddps/errors.hpp"
#include "ddps/graph.hpp"
#include "ddps/solver.hpp"
#include "ddps/weights.hpp"

namespace {

struct RunFlags {
    std::vector<std::string> configs;
    std::string out;
    long long seed = -1;
    long long iters = -1;
    long long record_every = -1;
    int jobs = 1;
};

int run_one(const std::string& config_path, const RunFlags& flags) {
    ddps::RunConfig cfg = ddps::load_config(config_path);
    if (!flags.out.empty())
        cfg.out = flags.out;
    if (flags.seed >= 0)
        cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.iters >= 0)
        cfg.iters = flags.iters;
    if (flags.record_every >= 0)
        cfg.record_every = static_cast<int>(flags.record_every);

    const auto t0 = std::chrono::steady_clock::now();
    ddps::RunInputs inputs = ddps::materialize(cfg);
    ddps::SolverTrace trace = ddps::run(inputs.graph, inputs.set, inputs.spec, inputs.sched,
                                        inputs.policy, inputs.opts);
    ddps::write_trace_csv(trace, cfg.out);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto& final_rows = trace.rows;
    const ddps::TraceRow& last_net = final_rows.back(); // agent -1 row of step K
    std::ostringstream summary;
    summary << config_path << ": K = " << trace.K << ", n = " << trace.n << ", p = " << trace.p
            << "\n";
    summary << "  final max residual        " << last_net.x_residual << "\n";
    summary << "  final max disagreement    " << last_net.consensus_x << "\n";
    summary << "  final gap                 " << last_net.gap << "\n";
    summary << "  max conservation residual " << trace.max_conservation_residual << "\n";
    summary << "  trace                     " << cfg.out << "\n";
    summary << "  wall time                 " << seconds << " s\n";
    std::cout << summary.str();
    return 0;
}

int cmd_run(const RunFlags& flags) {
    if (flags.configs.empty())
        throw ddps::config_error("run needs at least one --config");
    const bool has_overrides =
        !flags.out.empty() || flags.seed >= 0 || flags.iters >= 0 || flags.record_every >= 0;
    if (flags.configs.size() > 1 && has_overrides)
        throw ddps::config_error("--out/--seed/--iters/--record-every apply to a single config");
    if (flags.configs.size() == 1)
        return run_one(flags.configs[0], flags);

    // Fan independent configs out across worker threads; failures are collected,
    // the worst exit code wins.
    const int jobs = std::max(1, std::min<int>(flags.jobs, static_cast<int>(flags.configs.size())));
    std::vector<int> results(flags.configs.size(), 0);
    std::vector<std::string> messages(flags.configs.size());
    std::vector<std::thread> workers;
    std::size_t next_index = 0;
    std::mutex mutex;
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                std::size_t index;
                {
                    std::lock_guard<std::mutex> lock(mutex);
                    if (next_index >= flags.configs.size())
                        return;
                    index = next_index++;
                }
                try {
                    results[index] = run_one(flags.configs[index], flags);
                } catch (const ddps::config_error& e) {
                    results[index] = 1;
                    messages[index] = e.what();
                } catch (const ddps::numerical_error& e) {
                    results[index] = 2;
                    messages[index] = e.what();
                }
            }
        });
    }
    for (auto& worker : workers)
        worker.join();
    int worst = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i] != 0)
            std::cerr << "error: " << flags.configs[i] << ": " << messages[i] << "\n";
        worst = std::max(worst, results[i]);
    }
    return worst;
}

int cmd_gen_graph(int n, double extra_edge_prob, std::uint64_t seed, const std::string& out) {
    const ddps::DirectedGraph g = ddps::random_strongly_connected(n, extra_edge_prob, seed);
    ddps::save_edge_list(g, out);
    std::cout << "wrote " << out << ": n = " << g.n << ", " << g.edges.size()
              << " edges, strongly connected = " << (ddps::is_strongly_connected(g) ? "yes" : "no")
              << "\n";
    return 0;
}

int cmd_analyze_matrix(const std::string& graph_path, double epsilon, int k_max,
                       const std::string& out) {
    const ddps::DirectedGraph g = ddps::load_edge_list(graph_path);
    const auto [A, B] = ddps::build_weights(g);
    const Eigen::MatrixXd M = ddps::assemble_m(A, B, epsilon);
    const std::vector<double> errors = ddps::limit_error_series(M, k_max);
    const ddps::GammaFit fit = ddps::estimate_gamma(M, k_max);
    double upsilon = std::numeric_limits<double>::quiet_NaN();
    if (g.n >= 2)
        upsilon = ddps::epsilon_upper_bound(A, B);

    std::ofstream file(out, std::ios::binary);
    if (!file)
        throw ddps::config_error("cannot write analysis file: " + out);
    char buffer[256];
    file << "k, limit_error, fitted_gamma, fitted_Gamma, epsilon, upsilon_bound\n";
    for (int k = 1; k <= k_max; ++k) {
        std::snprintf(buffer, sizeof buffer, "%d, %.17g, %.17g, %.17g, %.17g, %.17g\n", k,
                      errors[static_cast<std::size_t>(k - 1)], fit.gamma, fit.Gamma, epsilon,
                      upsilon);
        file << buffer;
    }
    std::cout << graph_path << ": n = " << g.n << ", epsilon = " << epsilon << "\n";
    std::cout << "  fitted gamma   " << fit.gamma << " (r^2 = " << fit.r_squared << ")\n";
    std::cout << "  fitted Gamma   " << fit.Gamma << "\n";
    std::cout << "  limit error    " << errors.front() << " at k = 1, " << errors.back()
              << " at k = " << k_max << "\n";
    std::cout << "  upsilon bound  " << upsilon << "\n";
    std::cout << "  analysis       " << out << "\n";
    return 0;
}

int cmd_rate(const std::string& trace_path, std::string out) {
    std::ifstream in(trace_path);
    if (!in)
        throw ddps::config_error("cannot open trace file: " + trace_path);
    std::string line;
    if (!std::getline(in, line))
        throw ddps::config_error(trace_path + ": empty trace");
    std::vector<double> ks, gaps;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        // Split on commas and parse with stod: stream extraction rejects the
        // "nan" fields a trace legitimately contains.
        std::vector<double> fields;
        std::istringstream cells(line);
        std::string cell;
        bool bad = false;
        while (std::getline(cells, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (const std::exception&) {
                bad = true;
                break;
            }
        }
        if (bad || fields.size() != 9)
            throw ddps::config_error(trace_path + ": line " + std::to_string(line_no) +
                                     ": malformed trace row");
        if (fields[1] == -1.0 && fields[0] >= 1.0) {
            ks.push_back(fields[0]);
            gaps.push_back(fields[8]);
        }
    }
    const ddps::RateFit fit = ddps::rate_fit_series(ks, gaps);
    std::cout << trace_path << ": slope = " << fit.slope << ", r^2 = " << fit.r_squared << "\n";

    if (out.empty())
        out = trace_path + ".rate.csv";
    std::ofstream file(out, std::ios::binary);
    if (!file)
        throw ddps::config_error("cannot write rate file: " + out);
    file << "log_lnk_over_sqrtk, log_gap\n";
    char buffer[128];
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 2.0 || !std::isfinite(gaps[i]) || gaps[i] < 0.0)
            continue;
        std::snprintf(buffer, sizeof buffer, "%.17g, %.17g\n",
                      std::log(std::log(ks[i]) / std::sqrt(ks[i])),
                      std::log(std::max(gaps[i], 1e-14)));
        file << buffer;
    }
    std::cout << "  points         " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"directed-network projected subgradient toolkit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-graph", "generate a strongly connected digraph");
    int gen_n = 0;
    double gen_prob = 0.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "graph.txt";
    gen->add_option("--n", gen_n, "node count")->required();
    gen->add_option("--extra-edge-prob", gen_prob, "extra ordered-pair probability");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output edge-list path");

    auto* run = app.add_subcommand("run", "execute a config-driven solver run");
    RunFlags flags;
    run->add_option("--config", flags.configs, "config file (repeatable)")->required();
    run->add_option("--out", flags.out, "override the trace output path");
    run->add_option("--seed", flags.seed, "override the run seed");
    run->add_option("--iters", flags.iters, "override the iteration count");
    run->add_option("--record-every", flags.record_every, "override the trace decimation");
    run->add_option("--jobs", flags.jobs, "worker threads for multiple configs");

    auto* analyze = app.add_subcommand("analyze-matrix", "mixing-matrix convergence diagnostics");
    std::string analyze_graph;
    double analyze_eps = 0.0;
    int analyze_kmax = 200;
    std::string analyze_out = "matrix.csv";
    analyze->add_option("--graph", analyze_graph, "edge-list file")->required();
    analyze->add_option("--epsilon", analyze_eps, "surplus coupling weight")->required();
    analyze->add_option("--kmax", analyze_kmax, "largest power to analyze");
    analyze->add_option("--out", analyze_out, "output CSV path");

    auto* rate = app.add_subcommand("rate", "fit the gap-decay envelope on a trace");
    std::string rate_trace;
    std::string rate_out;
    rate->add_option("--trace", rate_trace, "trace CSV from a run")->required();
    rate->add_option("--out", rate_out, "output CSV path (default <trace>.rate.csv)");

    try {
        app.parse(argc, argv);
        if (gen->parsed())
            return cmd_gen_graph(gen_n, gen_prob, gen_seed, gen_out);
        if (run->parsed())
            return cmd_run(flags);
        if (analyze->parsed())
            return cmd_analyze_matrix(analyze_graph, analyze_eps, analyze_kmax, analyze_out);
        if (rate->parsed())
            return cmd_rate(rate_trace, rate_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const ddps::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ddps::numerical_error& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
