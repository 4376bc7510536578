#include "ddps/projection.hpp"

#include <string>

#include "ddps/errors.hpp"

namespace ddps {

ConstraintSet whole_space(int p) {
    if (p < 1)
        throw config_error("dimension must be positive");
    ConstraintSet set;
    set.kind = ConstraintSet::Kind::whole_space;
    set.p = p;
    return set;
}

ConstraintSet ball(Eigen::VectorXd center, double radius) {
    if (center.size() < 1)
        throw config_error("dimension must be positive");
    if (!(radius > 0.0))
        throw config_error("ball radius must be positive");
    ConstraintSet set;
    set.kind = ConstraintSet::Kind::ball;
    set.p = static_cast<int>(center.size());
    set.center = std::move(center);
    set.radius = radius;
    return set;
}

ConstraintSet ball(int p, double radius) {
    return ball(Eigen::VectorXd::Zero(p), radius);
}

ConstraintSet box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
    if (lower.size() < 1 || lower.size() != upper.size())
        throw config_error("box bounds must be nonempty and of equal dimension");
    if ((lower.array() > upper.array()).any())
        throw config_error("box lower bound exceeds upper bound");
    ConstraintSet set;
    set.kind = ConstraintSet::Kind::box;
    set.p = static_cast<int>(lower.size());
    set.lower = std::move(lower);
    set.upper = std::move(upper);
    return set;
}

Eigen::VectorXd project(const ConstraintSet& set, const Eigen::VectorXd& x) {
    if (x.size() != set.p)
        throw config_error("projection input has dimension " + std::to_string(x.size()) +
                           ", set has dimension " + std::to_string(set.p));
    if (!x.allFinite())
        throw numerical_error("non-finite input to projection");
    switch (set.kind) {
    case ConstraintSet::Kind::whole_space:
        return x;
    case ConstraintSet::Kind::ball: {
        const Eigen::VectorXd d = x - set.center;
        const double dist = d.norm();
        if (dist <= set.radius)
            return x;
        return set.center + d * (set.radius / dist);
    }
    case ConstraintSet::Kind::box:
        return x.cwiseMax(set.lower).cwiseMin(set.upper);
    }
    throw config_error("unknown constraint kind");
}

bool contains(const ConstraintSet& set, const Eigen::VectorXd& x, double tol) {
    if (x.size() != set.p)
        return false;
    switch (set.kind) {
    case ConstraintSet::Kind::whole_space:
        return true;
    case ConstraintSet::Kind::ball:
        return (x - set.center).norm() <= set.radius + tol;
    case ConstraintSet::Kind::box:
        return (x.array() >= set.lower.array() - tol).all() &&
               (x.array() <= set.upper.array() + tol).all();
    }
    return false;
}

std::pair<bool, bool> check_projection_inequalities(const ConstraintSet& set,
                                                    const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& y) {
    constexpr double membership_tol = 1e-12;
    constexpr double slack = 1e-10;
    if ((project(set, y) - y).lpNorm<Eigen::Infinity>() > membership_tol)
        throw config_error("y is not in the constraint set");
    const Eigen::VectorXd px = project(set, x);
    const bool a_ok = (y - px).dot(x - px) <= slack;
    const bool b_ok =
        (px - y).squaredNorm() <= (x - y).squaredNorm() - (px - x).squaredNorm() + slack;
    return {a_ok, b_ok};
}

} // namespace ddps
