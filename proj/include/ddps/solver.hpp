#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddps/oracle.hpp"
#include "ddps/projection.hpp"
#include "ddps/weights.hpp"

namespace ddps {

// Network state at iteration k. Column i of X is agent i's estimate x_i, column i
// of Y its surplus y_i. z_bar = (sum_i x_i + sum_i y_i) / n is the accumulation
// state whose trajectory carries the optimality analysis.
struct SolverState {
    long long k = 0;
    Eigen::MatrixXd X; // p x n
    Eigen::MatrixXd Y; // p x n
    Eigen::VectorXd z_bar;
};

SolverState make_initial_state(int p, int n); // all zeros

// One synchronous round; every agent reads the k-snapshot:
//   x_i' = P_X[ sum_j a_ij x_j + eps y_i - alpha_k grad f_i(x_i) ]
//   y_i' = x_i - sum_j a_ij x_j + sum_j b_ij y_j - eps y_i
// All inner sums run in ascending agent index (a fixed order the compact route
// reproduces, making the two implementations comparable at 1e-12). If g_out is
// non-null it receives the per-agent perturbations g_i = x_i' - sum_j a_ij x_j
// - eps y_i (p x n). Throws numerical_error if the new state is not finite.
SolverState step(const SolverState& state, const SurplusSystem& sys, const ConstraintSet& set,
                 const ObjectiveSpec& spec, const StepSchedule& sched,
                 Eigen::MatrixXd* g_out = nullptr);

// The same round routed through the augmented system: Z stacks the state as
// columns (x_1..x_n, y_1..y_n), the update is z_i' = sum_j m_ij z_j + g_i with
// the perturbation zero on the surplus half. Hand-authored independently of
// step() as a cross-check of the algebra; k supplies alpha_k.
Eigen::MatrixXd step_compact(const Eigen::MatrixXd& Z, long long k, const SurplusSystem& sys,
                             const ConstraintSet& set, const ObjectiveSpec& spec,
                             const StepSchedule& sched);

// One CSV row. agent in [0, n) carries that agent's series (and its own ||g_i||
// in g_total); agent = -1 carries the network series: maxima of the per-agent
// columns plus g_k = sum_i ||g_i||, f(z_bar), the running best f, and the gap.
// Fields that are undefined at a given row (x* unknown, k = 0, network-only
// columns on agent rows) hold NaN.
struct TraceRow {
    long long k = 0;
    int agent = -1;
    double x_residual = 0, consensus_x = 0, y_norm = 0, g_total = 0;
    double f_zbar = 0, f_best = 0, gap = 0;
};

struct SolverTrace {
    int n = 0, p = 0;
    long long K = 0;
    int record_every = 1;
    std::vector<TraceRow> rows;

    // Streaming diagnostics, accumulated over every iteration (recording only
    // decimates the rows, never these).
    double max_conservation_residual = 0.0; // max_k ||n z'  - n z - sum_i g_i||_inf
    std::vector<double> window_consensus;   // 100-iteration means of max_i ||x_i - z_bar||
    std::vector<double> window_surplus;     // 100-iteration means of max_i ||y_i||
    struct Sums {
        double alpha_g = 0.0; // sum alpha_k g_k
        double g_sq = 0.0;    // sum g_k^2
        double alpha_sq = 0.0; // sum alpha_k^2
    };
    Sums sums_half, sums_end; // sampled at k = K/2 and k = K

    std::optional<double> f_star;
    SolverState final_state;
};

struct RunOptions {
    long long K = 0;
    int record_every = 100;
    std::uint64_t seed = 0;
    std::optional<Eigen::VectorXd> x_star; // fills the residual column when known
    std::optional<double> f_star;          // fills the gap column when known
    bool consensus_init = false;           // start all agents at consensus_value instead of zero
    double consensus_value = 0.0;
};

// Full driver: builds the mixing system from the graph and policy, starts from
// zero states (the analysis convention), iterates step() K times, records every
// record_every-th iteration plus k = 0 and k = K, and runs the streaming checks.
// Deterministic in all inputs.
SolverTrace run(const DirectedGraph& g, const ConstraintSet& set, const ObjectiveSpec& spec,
                const StepSchedule& sched, const EpsilonPolicy& policy, const RunOptions& opts);

// Header (byte-exact): k, agent, x_residual, consensus_x, y_norm, g_total, f_zbar, f_best, gap
void write_trace_csv(const SolverTrace& trace, const std::string& path);

struct RateFit {
    double slope = 0.0;
    double r_squared = 0.0;
};

// Least-squares slope of log(gap) against log(ln k / sqrt(k)) over the second
// half of the network rows (k >= 2; gaps clamped below at 1e-14 before logs).
// A slope near 1 matches the ln K / sqrt(K) envelope. Throws config_error with
// fewer than 50 usable rows and numerical_error on negative tail gaps (an
// overestimated f*).
RateFit rate_fit(const SolverTrace& trace);
RateFit rate_fit_series(const std::vector<double>& ks, const std::vector<double>& gaps);

} // namespace ddps
