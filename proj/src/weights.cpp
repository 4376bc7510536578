#include "ddps/weights.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "ddps/errors.hpp"

namespace ddps {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_weights(const DirectedGraph& g) {
    if (!is_strongly_connected(g))
        throw config_error("weights need a strongly connected graph");
    const int n = g.n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto in = in_neighbors(g, i);
        const double w = 1.0 / static_cast<double>(in.size());
        for (int j : in)
            A(i, j) = w;
    }
    for (int j = 0; j < n; ++j) {
        const auto out = out_neighbors(g, j);
        const double w = 1.0 / static_cast<double>(out.size());
        for (int i : out)
            B(i, j) = w;
    }
    return {std::move(A), std::move(B)};
}

namespace {

void require_stochastic(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw config_error("A and B must be square and of equal size");
    const double row_dev = (A.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col_dev = (B.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (row_dev > 1e-9 || col_dev > 1e-9)
        throw config_error("A must be row-stochastic and B column-stochastic");
}

} // namespace

Eigen::MatrixXd assemble_m(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double epsilon) {
    require_stochastic(A, B);
    const int n = static_cast<int>(A.rows());
    const double min_bii = B.diagonal().minCoeff();
    if (!(epsilon > 0.0) || epsilon > min_bii)
        throw config_error("epsilon out of range: need 0 < epsilon <= min_i b_ii = " +
                           std::to_string(min_bii));
    Eigen::MatrixXd M(2 * n, 2 * n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    M.topLeftCorner(n, n) = A;
    M.topRightCorner(n, n) = epsilon * I;
    M.bottomLeftCorner(n, n) = I - A;
    M.bottomRightCorner(n, n) = B - epsilon * I;
    return M;
}

double epsilon_upper_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    require_stochastic(A, B);
    const int n = static_cast<int>(A.rows());
    if (n < 2)
        throw config_error(
            "epsilon_upper_bound requires n >= 2 (a 2x2 augmented matrix has no third eigenvalue)");
    Eigen::MatrixXd M0(2 * n, 2 * n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    M0.topLeftCorner(n, n) = A;
    M0.topRightCorner(n, n).setZero();
    M0.bottomLeftCorner(n, n) = I - A;
    M0.bottomRightCorner(n, n) = B;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(M0, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw numerical_error("eigensolver failed on the augmented matrix");
    std::vector<std::complex<double>> eigs(solver.eigenvalues().data(),
                                           solver.eigenvalues().data() + 2 * n);
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb)
            return ma > mb;
        return a.real() > b.real();
    });
    const double lam3 = std::abs(eigs[2]);
    if (lam3 >= 1.0)
        throw numerical_error("third eigenvalue modulus >= 1; bound undefined");
    // (1 - lam3)^n / (20 + 8n)^n evaluated as exp(n * (log1p(-lam3) - log(20 + 8n))).
    const double log_bound =
        static_cast<double>(n) * (std::log1p(-lam3) - std::log(20.0 + 8.0 * n));
    return std::exp(log_bound);
}

Eigen::MatrixXd limit_matrix(int n) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    L.topRows(n).setConstant(1.0 / static_cast<double>(n));
    return L;
}

namespace {

double limit_error_of(const Eigen::MatrixXd& P, const Eigen::MatrixXd& L) {
    if (!P.allFinite())
        throw numerical_error("overflow/NaN in matrix powering");
    return (P - L).cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace

double matrix_limit_error(const Eigen::MatrixXd& M, int k) {
    if (k < 0)
        throw config_error("power k must be nonnegative");
    const int n = static_cast<int>(M.rows()) / 2;
    const Eigen::MatrixXd L = limit_matrix(n);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int i = 0; i < k; ++i)
        P = P * M;
    return limit_error_of(P, L);
}

std::vector<double> limit_error_series(const Eigen::MatrixXd& M, int k_max) {
    if (k_max < 1)
        throw config_error("k_max must be at least 1");
    const int n = static_cast<int>(M.rows()) / 2;
    const Eigen::MatrixXd L = limit_matrix(n);
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(k_max));
    Eigen::MatrixXd P = M;
    errors.push_back(limit_error_of(P, L));
    for (int k = 2; k <= k_max; ++k) {
        P = P * M;
        errors.push_back(limit_error_of(P, L));
    }
    return errors;
}

GammaFit estimate_gamma(const Eigen::MatrixXd& M, int k_max) {
    if (k_max < 2)
        throw config_error("estimate_gamma needs k_max >= 2");
    const std::vector<double> errors = limit_error_series(M, k_max);

    // Fit log e_k = log Gamma + k log gamma. Exact zeros (possible once the power
    // has fully converged in floating point) are floored so the log is defined.
    const int m = k_max;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> ys(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
        const double y = std::log(std::max(errors[static_cast<std::size_t>(k - 1)], 1e-300));
        ys[static_cast<std::size_t>(k - 1)] = y;
        sx += k;
        sy += y;
        sxx += static_cast<double>(k) * k;
        sxy += k * y;
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / m;
    for (int k = 1; k <= m; ++k) {
        const double y = ys[static_cast<std::size_t>(k - 1)];
        const double fit = intercept + slope * k;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    const double gamma = std::exp(slope);
    if (!(gamma < 1.0))
        throw numerical_error("fitted gamma >= 1: powers of M are not contracting "
                              "(epsilon too large or graph pathology)");
    if (!(gamma > 0.0))
        throw numerical_error("fitted gamma is not positive");
    return GammaFit{std::exp(intercept), gamma, r2};
}

double resolve_epsilon(const Eigen::MatrixXd& B, const EpsilonPolicy& policy) {
    const double min_bii = B.diagonal().minCoeff();
    if (policy.is_auto) {
        if (!(policy.cap > 0.0))
            throw config_error("epsilon cap must be positive");
        return std::min(policy.cap, 0.99 * min_bii);
    }
    if (!(policy.value > 0.0) || policy.value > min_bii)
        throw config_error("explicit epsilon " + std::to_string(policy.value) +
                           " outside (0, min_i b_ii = " + std::to_string(min_bii) + "]");
    return policy.value;
}

SurplusSystem make_surplus_system(const DirectedGraph& g, const EpsilonPolicy& policy) {
    auto [A, B] = build_weights(g);
    const double epsilon = resolve_epsilon(B, policy);
    Eigen::MatrixXd M = assemble_m(A, B, epsilon);
    return SurplusSystem{g.n, std::move(A), std::move(B), epsilon, std::move(M)};
}

} // namespace ddps
