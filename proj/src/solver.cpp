#include "ddps/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ddps/errors.hpp"

namespace ddps {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();
constexpr int window_len = 100;

void require_finite(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, long long k) {
    if (!X.allFinite() || !Y.allFinite())
        throw numerical_error("non-finite state at iteration " + std::to_string(k));
}

} // namespace

SolverState make_initial_state(int p, int n) {
    SolverState state;
    state.k = 0;
    state.X = Eigen::MatrixXd::Zero(p, n);
    state.Y = Eigen::MatrixXd::Zero(p, n);
    state.z_bar = Eigen::VectorXd::Zero(p);
    return state;
}

namespace {

// z_bar per the accumulation-state definition: (1/n) sum over all 2n stacked
// agents, x-half first, each half in ascending index order.
Eigen::VectorXd accumulation_state(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(X.rows());
    for (Eigen::Index i = 0; i < X.cols(); ++i)
        acc += X.col(i);
    for (Eigen::Index i = 0; i < Y.cols(); ++i)
        acc += Y.col(i);
    return acc / static_cast<double>(X.cols());
}

} // namespace

SolverState step(const SolverState& state, const SurplusSystem& sys, const ConstraintSet& set,
                 const ObjectiveSpec& spec, const StepSchedule& sched, Eigen::MatrixXd* g_out) {
    const int n = sys.n;
    const int p = static_cast<int>(state.X.rows());
    if (state.X.cols() != n || state.Y.cols() != n || spec.n != n || set.p != p || spec.p != p)
        throw config_error("step: inconsistent dimensions between state, system, set, and objective");
    const double eps = sys.epsilon;
    const double alpha = sched.alpha(state.k);

    // Mixed neighbor sums, ascending j. Structural zeros of A and B contribute
    // exact zero terms, so iterating all j equals iterating the neighbor lists.
    Eigen::MatrixXd mix_x(p, n), mix_y(p, n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd acc_x = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd acc_y = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < n; ++j) {
            acc_x += sys.A(i, j) * state.X.col(j);
            acc_y += sys.B(i, j) * state.Y.col(j);
        }
        mix_x.col(i) = acc_x;
        mix_y.col(i) = acc_y;
    }

    SolverState next;
    next.k = state.k + 1;
    next.X.resize(p, n);
    next.Y.resize(p, n);
    if (g_out)
        g_out->resize(p, n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd grad = subgradient(spec, i, state.X.col(i));
        const Eigen::VectorXd pre = mix_x.col(i) + eps * state.Y.col(i) - alpha * grad;
        next.X.col(i) = project(set, pre);
        if (g_out)
            g_out->col(i) = next.X.col(i) - mix_x.col(i) - eps * state.Y.col(i);
        next.Y.col(i) =
            state.X.col(i) - mix_x.col(i) + mix_y.col(i) - eps * state.Y.col(i);
    }
    require_finite(next.X, next.Y, next.k);
    next.z_bar = accumulation_state(next.X, next.Y);
    return next;
}

Eigen::MatrixXd step_compact(const Eigen::MatrixXd& Z, long long k, const SurplusSystem& sys,
                             const ConstraintSet& set, const ObjectiveSpec& spec,
                             const StepSchedule& sched) {
    const int n = sys.n;
    const int p = static_cast<int>(Z.rows());
    if (Z.cols() != 2 * n || spec.n != n || set.p != p || spec.p != p)
        throw config_error("step_compact: state must stack 2n agent columns");
    const double eps = sys.epsilon;
    const double alpha = sched.alpha(k);

    // Perturbations first: g_i is defined through the projected x-update and is
    // zero on the surplus half.
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(p, 2 * n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd mix = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < n; ++j)
            mix += sys.A(i, j) * Z.col(j);
        const Eigen::VectorXd grad = subgradient(spec, i, Z.col(i));
        const Eigen::VectorXd x_next = project(set, mix + eps * Z.col(n + i) - alpha * grad);
        G.col(i) = x_next - mix - eps * Z.col(n + i);
    }
    // Then the linear pass through the assembled M, ascending over all 2n columns.
    Eigen::MatrixXd Zn(p, 2 * n);
    for (int r = 0; r < 2 * n; ++r) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < 2 * n; ++j)
            acc += sys.M(r, j) * Z.col(j);
        Zn.col(r) = acc + G.col(r);
    }
    if (!Zn.allFinite())
        throw numerical_error("non-finite state at iteration " + std::to_string(k + 1));
    return Zn;
}

namespace {

void push_row(SolverTrace& trace, const SolverState& state, const Eigen::MatrixXd* G,
              const std::optional<Eigen::VectorXd>& x_star, double f_zbar, double f_best,
              const std::optional<double>& f_star) {
    const int n = trace.n;
    const bool have_best = std::isfinite(f_best);
    double max_res = x_star ? 0.0 : nan_value;
    double max_cons = 0.0, max_y = 0.0, g_total = 0.0;
    for (int i = 0; i < n; ++i) {
        TraceRow row;
        row.k = state.k;
        row.agent = i;
        row.x_residual = x_star ? (state.X.col(i) - *x_star).norm() : nan_value;
        row.consensus_x = (state.X.col(i) - state.z_bar).norm();
        row.y_norm = state.Y.col(i).norm();
        row.g_total = G ? G->col(i).norm() : nan_value;
        row.f_zbar = nan_value;
        row.f_best = nan_value;
        row.gap = nan_value;
        trace.rows.push_back(row);
        if (x_star)
            max_res = std::max(max_res, row.x_residual);
        max_cons = std::max(max_cons, row.consensus_x);
        max_y = std::max(max_y, row.y_norm);
        if (G)
            g_total += row.g_total;
    }
    TraceRow net;
    net.k = state.k;
    net.agent = -1;
    net.x_residual = max_res;
    net.consensus_x = max_cons;
    net.y_norm = max_y;
    net.g_total = G ? g_total : nan_value;
    net.f_zbar = f_zbar;
    net.f_best = have_best ? f_best : nan_value;
    net.gap = (have_best && f_star) ? f_best - *f_star : nan_value;
    trace.rows.push_back(net);
}

} // namespace

SolverTrace run(const DirectedGraph& g, const ConstraintSet& set, const ObjectiveSpec& spec,
                const StepSchedule& sched, const EpsilonPolicy& policy, const RunOptions& opts) {
    if (opts.K < 1)
        throw config_error("run needs K >= 1 iterations");
    if (opts.record_every < 1)
        throw config_error("record_every must be positive");
    if (opts.x_star && opts.x_star->size() != spec.p)
        throw config_error("x_star has the wrong dimension");
    const SurplusSystem sys = make_surplus_system(g, policy);
    const int n = sys.n;
    const int p = spec.p;
    if (spec.n != n)
        throw config_error("objective has " + std::to_string(spec.n) + " agents, graph has " +
                           std::to_string(n));

    SolverTrace trace;
    trace.n = n;
    trace.p = p;
    trace.K = opts.K;
    trace.record_every = opts.record_every;
    trace.f_star = opts.f_star;

    SolverState state = make_initial_state(p, n);
    if (opts.consensus_init) {
        state.X.setConstant(opts.consensus_value);
        state.z_bar = accumulation_state(state.X, state.Y);
    }

    double f_best = nan_value; // min over 0 < k <= K, so undefined at k = 0
    push_row(trace, state, nullptr, opts.x_star, global_objective(spec, state.z_bar), f_best,
             opts.f_star);

    const long long half = opts.K / 2;
    double window_cons_acc = 0.0, window_y_acc = 0.0;
    int window_fill = 0;
    Eigen::MatrixXd G(p, n);
    for (long long k = 0; k < opts.K; ++k) {
        SolverState next = step(state, sys, set, spec, sched, &G);

        // Mass conservation, a consequence of M's unit column sums: the change of
        // n z_bar must equal the total perturbation, every single iteration.
        Eigen::VectorXd g_sum = Eigen::VectorXd::Zero(p);
        for (int i = 0; i < n; ++i)
            g_sum += G.col(i);
        const double resid =
            (static_cast<double>(n) * next.z_bar - static_cast<double>(n) * state.z_bar - g_sum)
                .lpNorm<Eigen::Infinity>();
        trace.max_conservation_residual = std::max(trace.max_conservation_residual, resid);

        double g_k = 0.0;
        for (int i = 0; i < n; ++i)
            g_k += G.col(i).norm();
        const double alpha = sched.alpha(k);
        trace.sums_end.alpha_g += alpha * g_k;
        trace.sums_end.g_sq += g_k * g_k;
        trace.sums_end.alpha_sq += alpha * alpha;
        if (next.k == half)
            trace.sums_half = trace.sums_end;

        const double f_now = global_objective(spec, next.z_bar);
        f_best = std::isnan(f_best) ? f_now : std::min(f_best, f_now);

        double max_cons = 0.0, max_y = 0.0;
        for (int i = 0; i < n; ++i) {
            max_cons = std::max(max_cons, (next.X.col(i) - next.z_bar).norm());
            max_y = std::max(max_y, next.Y.col(i).norm());
        }
        window_cons_acc += max_cons;
        window_y_acc += max_y;
        if (++window_fill == window_len) {
            trace.window_consensus.push_back(window_cons_acc / window_len);
            trace.window_surplus.push_back(window_y_acc / window_len);
            window_cons_acc = window_y_acc = 0.0;
            window_fill = 0;
        }

        if (next.k % opts.record_every == 0 || next.k == opts.K)
            push_row(trace, next, &G, opts.x_star, f_now, f_best, opts.f_star);
        state = std::move(next);
    }
    trace.final_state = std::move(state);
    return trace;
}

namespace {

std::string format_value(double v) {
    if (std::isnan(v))
        return "nan";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

} // namespace

void write_trace_csv(const SolverTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw config_error("cannot write trace file: " + path);
    out << "k, agent, x_residual, consensus_x, y_norm, g_total, f_zbar, f_best, gap\n";
    for (const TraceRow& row : trace.rows) {
        out << row.k << ", " << row.agent << ", " << format_value(row.x_residual) << ", "
            << format_value(row.consensus_x) << ", " << format_value(row.y_norm) << ", "
            << format_value(row.g_total) << ", " << format_value(row.f_zbar) << ", "
            << format_value(row.f_best) << ", " << format_value(row.gap) << "\n";
    }
}

RateFit rate_fit_series(const std::vector<double>& ks, const std::vector<double>& gaps) {
    if (ks.size() != gaps.size())
        throw config_error("rate fit: k and gap series differ in length");
    // Usable rows: k >= 2 (ln 1 = 0 would put a log(0) in the regressor) with a
    // finite gap. The envelope regressor is log(ln k / sqrt(k)).
    std::vector<double> k_use, gap_use;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] >= 2.0 && std::isfinite(gaps[i])) {
            k_use.push_back(ks[i]);
            gap_use.push_back(gaps[i]);
        }
    }
    if (k_use.size() < 50)
        throw config_error("insufficient rows for a rate fit (need 50 with defined gaps, have " +
                           std::to_string(k_use.size()) + ")");
    const std::size_t begin = k_use.size() / 2; // fit over the tail
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs, ys;
    for (std::size_t i = begin; i < k_use.size(); ++i) {
        if (gap_use[i] < 0.0)
            throw numerical_error("nonpositive gaps in the fit window: the f* estimate is "
                                  "too high (reference solver failure)");
        const double x = std::log(std::log(k_use[i]) / std::sqrt(k_use[i]));
        const double y = std::log(std::max(gap_use[i], 1e-14));
        xs.push_back(x);
        ys.push_back(y);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(xs.size());
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0)
        throw numerical_error("rate fit is degenerate (no spread in k)");
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / m;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = intercept + slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    return RateFit{slope, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

RateFit rate_fit(const SolverTrace& trace) {
    std::vector<double> ks, gaps;
    for (const TraceRow& row : trace.rows) {
        if (row.agent == -1 && row.k >= 1) {
            ks.push_back(static_cast<double>(row.k));
            gaps.push_back(row.gap);
        }
    }
    return rate_fit_series(ks, gaps);
}

} // namespace ddps
