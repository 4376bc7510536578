#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddps/projection.hpp"

namespace ddps {

// One agent's convex objective. Families:
//   logistic:          f_i(x) = sum_j log(1 + exp(-y_j * c_j.x)), rows of `samples`
//                      are the feature vectors c_j, `labels` in {-1, +1}
//   sum_of_distances:  f_i(x) = sum_j ||x - anchor_j||
//   zero:              f_i = 0 (an agent that only relays)
struct AgentObjective {
    enum class Family { zero, logistic, sum_of_distances };
    Family family = Family::zero;
    Eigen::MatrixXd samples; // m x p (logistic)
    Eigen::VectorXd labels;  // m     (logistic)
    std::vector<Eigen::VectorXd> anchors; // sum_of_distances
};

// The network objective f(x) = sum_i f_i(x), with certified subgradient bounds:
// for logistic B_i = sum_j ||c_j|| (the per-sample factor sigma(.) is < 1), for
// sum_of_distances B_i = #anchors (each term contributes a unit vector or zero).
struct ObjectiveSpec {
    int n = 0;
    int p = 0;
    std::vector<AgentObjective> agents;
    Eigen::VectorXd agent_bounds; // B_i
    double B = 0.0;               // max_i B_i
};

ObjectiveSpec make_objective(int n, int p, std::vector<AgentObjective> agents);

// One subgradient of f_i at x. Logistic uses the exact gradient with the
// stable sigmoid; sum_of_distances uses (x - a)/||x - a|| per anchor with the
// zero-vector convention at x = a. Norm is always <= B.
Eigen::VectorXd subgradient(const ObjectiveSpec& spec, int i, const Eigen::VectorXd& x);

double objective_value(const ObjectiveSpec& spec, int i, const Eigen::VectorXd& x);
double global_objective(const ObjectiveSpec& spec, const Eigen::VectorXd& x);

// Diminishing schedule alpha_k = a / sqrt(k + 1); the +1 offset fixes the k = 0
// convention at alpha_0 = a. Non-increasing, non-summable, square-summable.
struct StepSchedule {
    double a = 1.0;
    double alpha(long long k) const { return a / std::sqrt(static_cast<double>(k) + 1.0); }
};

// Synthetic logistic data: a planted standard-normal separator w, standard-normal
// features, labels sign(c.w) with a 10% flip rate. Draw order is fixed (w first,
// then per agent in index order: p feature normals per sample, then one flip
// uniform) so a seed pins the dataset across platforms.
ObjectiveSpec make_logistic_synthetic(int n, int p, int samples_per_agent, std::uint64_t seed);

// CSV loaders. Logistic: header "label, f_1..f_p" with an optional leading
// "agent" column; without it, samples go to agents round-robin in row order.
// Anchors: header "agent, c_1..c_p"; agents absent from the file get the zero
// objective.
ObjectiveSpec load_logistic_csv(const std::string& path, int n);
ObjectiveSpec load_anchors_csv(const std::string& path, int n, int p);

struct Optimum {
    Eigen::VectorXd x_star;
    double f_star = 0.0;
};

// Centralized projected subgradient on the global objective, started from the
// set's center (origin for whole space) plus a small seeded perturbation, with
// schedule 1/sqrt(k+1) and iterate averaging; returns the better of the best
// visited point and the averaged point. Shares only project() and the oracles
// with the distributed solver, so agreement between the two is evidence.
Optimum reference_optimum(const ObjectiveSpec& spec, const ConstraintSet& set, long long budget,
                          std::uint64_t seed);

// Analytic optimum for 1-D sum-of-distances on an interval: the median of all
// anchors clamped to [lo, hi]. Requires p = 1 and at least one anchor.
Optimum clipped_median_optimum(const ObjectiveSpec& spec, double lo, double hi);

} // namespace ddps
