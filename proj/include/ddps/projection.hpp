#pragma once

#include <utility>

#include <Eigen/Dense>

namespace ddps {

// A closed convex set with a closed-form Euclidean projection. Only these three
// variants are supported on purpose: anything else would need an inner QP solver.
struct ConstraintSet {
    enum class Kind { whole_space, ball, box };
    Kind kind = Kind::whole_space;
    int p = 0;
    Eigen::VectorXd center; // ball
    double radius = 0.0;    // ball
    Eigen::VectorXd lower;  // box
    Eigen::VectorXd upper;  // box
};

ConstraintSet whole_space(int p);
ConstraintSet ball(Eigen::VectorXd center, double radius);
ConstraintSet ball(int p, double radius); // centered at the origin
ConstraintSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);

// Nearest point of the set: identity / radial scaling / componentwise clamp.
// Throws on dimension mismatch (config_error) and non-finite input (numerical_error).
Eigen::VectorXd project(const ConstraintSet& set, const Eigen::VectorXd& x);

bool contains(const ConstraintSet& set, const Eigen::VectorXd& x, double tol = 1e-12);

// The two defining inequalities of a Euclidean projection onto a closed convex
// set, checked with 1e-10 slack for floating-point accumulation:
//   (a) <y - P[x], x - P[x]> <= 0          for every y in the set
//   (b) ||P[x] - y||^2 <= ||x - y||^2 - ||P[x] - x||^2
// y must be in the set (verified via project(set, y) = y within 1e-12).
std::pair<bool, bool> check_projection_inequalities(const ConstraintSet& set,
                                                    const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& y);

} // namespace ddps
