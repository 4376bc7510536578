#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddps/graph.hpp"

namespace ddps {

// The mixing system for a directed topology: row-stochastic in-weights A,
// column-stochastic out-weights B, and the augmented 2n x 2n matrix
//   M = [[A, eps*I], [I - A, B - eps*I]]
// whose every column sums to 1. Powers of M converge geometrically to
// [[ones/n, ones/n], [0, 0]] for small enough eps, which is what drives the
// surplus-consensus averaging.
struct SurplusSystem {
    int n = 0;
    Eigen::MatrixXd A; // a_ij = 1/|N_i^in| on in-neighbors (incl. self), else 0
    Eigen::MatrixXd B; // b_ij = 1/|N_j^out| on out-neighbors (incl. self), else 0
    double epsilon = 0.0;
    Eigen::MatrixXd M;
};

// Uniform weights from the topology. Requires strong connectivity.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_weights(const DirectedGraph& g);

// Exact block assembly; throws unless 0 < epsilon <= min_i b_ii.
Eigen::MatrixXd assemble_m(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double epsilon);

// The spectral admissibility bound (1 - |lam3|)^n / (20 + 8n)^n, where lam3 is
// the third-largest eigenvalue of M at eps = 0, ordered by modulus descending
// with ties broken by real part descending. Computed in log space (the plain
// product underflows well inside the usable n range). Reference value only; the
// operational eps comes from EpsilonPolicy. Throws for n < 2 (a 2x2 augmented
// matrix has no third eigenvalue).
double epsilon_upper_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// [[ones/n, ones/n], [0, 0]], the limit of M^k.
Eigen::MatrixXd limit_matrix(int n);

// Max-row-sum norm of M^k minus limit_matrix. k = 0 gives ||I - limit||.
double matrix_limit_error(const Eigen::MatrixXd& M, int k);

// ||M^k - limit|| for k = 1..k_max (incremental powering, one pass).
std::vector<double> limit_error_series(const Eigen::MatrixXd& M, int k_max);

struct GammaFit {
    double Gamma;     // fitted prefactor
    double gamma;     // fitted geometric rate, in (0, 1) or estimate_gamma throws
    double r_squared; // quality of the log-linear fit
};

// Least-squares fit of log error_k ~ log Gamma + k log gamma over k in [1, k_max].
GammaFit estimate_gamma(const Eigen::MatrixXd& M, int k_max);

// Operational epsilon selection. auto mode: min(cap, 0.99 * min_i b_ii); an
// explicit value must satisfy 0 < value <= min_i b_ii.
struct EpsilonPolicy {
    bool is_auto = true;
    double value = 0.0;
    double cap = 1e-3;
};

double resolve_epsilon(const Eigen::MatrixXd& B, const EpsilonPolicy& policy);

SurplusSystem make_surplus_system(const DirectedGraph& g, const EpsilonPolicy& policy);

} // namespace ddps
