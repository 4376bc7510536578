#include "ddps/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ddps/errors.hpp"
#include "ddps/rng.hpp"

namespace ddps {

namespace {

double agent_bound(const AgentObjective& agent) {
    switch (agent.family) {
    case AgentObjective::Family::zero:
        return 0.0;
    case AgentObjective::Family::logistic:
        return agent.samples.rowwise().norm().sum();
    case AgentObjective::Family::sum_of_distances:
        return static_cast<double>(agent.anchors.size());
    }
    return 0.0;
}

} // namespace

ObjectiveSpec make_objective(int n, int p, std::vector<AgentObjective> agents) {
    if (n < 1 || p < 1)
        throw config_error("objective needs n >= 1 agents and dimension p >= 1");
    if (static_cast<int>(agents.size()) != n)
        throw config_error("expected one objective descriptor per agent");
    for (int i = 0; i < n; ++i) {
        const AgentObjective& a = agents[static_cast<std::size_t>(i)];
        if (a.family == AgentObjective::Family::logistic) {
            if (a.samples.cols() != p)
                throw config_error("agent " + std::to_string(i) + ": feature dimension " +
                                   std::to_string(a.samples.cols()) + " != p = " +
                                   std::to_string(p));
            if (a.samples.rows() != a.labels.size())
                throw config_error("agent " + std::to_string(i) + ": sample/label count mismatch");
            for (Eigen::Index s = 0; s < a.labels.size(); ++s)
                if (a.labels(s) != 1.0 && a.labels(s) != -1.0)
                    throw config_error("agent " + std::to_string(i) + ": labels must be -1 or +1");
        } else if (a.family == AgentObjective::Family::sum_of_distances) {
            for (const auto& anchor : a.anchors)
                if (anchor.size() != p)
                    throw config_error("agent " + std::to_string(i) + ": anchor dimension " +
                                       std::to_string(anchor.size()) + " != p = " +
                                       std::to_string(p));
        }
    }
    ObjectiveSpec spec;
    spec.n = n;
    spec.p = p;
    spec.agents = std::move(agents);
    spec.agent_bounds.resize(n);
    for (int i = 0; i < n; ++i)
        spec.agent_bounds(i) = agent_bound(spec.agents[static_cast<std::size_t>(i)]);
    spec.B = spec.agent_bounds.maxCoeff();
    return spec;
}

namespace {

void check_eval(const ObjectiveSpec& spec, int i, const Eigen::VectorXd& x) {
    if (i < 0 || i >= spec.n)
        throw config_error("agent index " + std::to_string(i) + " out of range");
    if (x.size() != spec.p)
        throw config_error("evaluation point has wrong dimension");
    if (!x.allFinite())
        throw numerical_error("non-finite evaluation point");
}

// log(1 + exp(-m)) without overflow on either tail.
double logistic_loss(double m) {
    return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// sigma(-m) = 1 / (1 + exp(m)) without overflow on either tail.
double sigmoid_neg(double m) {
    if (m >= 0) {
        const double e = std::exp(-m);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(m));
}

} // namespace

Eigen::VectorXd subgradient(const ObjectiveSpec& spec, int i, const Eigen::VectorXd& x) {
    check_eval(spec, i, x);
    const AgentObjective& agent = spec.agents[static_cast<std::size_t>(i)];
    Eigen::VectorXd g = Eigen::VectorXd::Zero(spec.p);
    switch (agent.family) {
    case AgentObjective::Family::zero:
        break;
    case AgentObjective::Family::logistic:
        for (Eigen::Index s = 0; s < agent.samples.rows(); ++s) {
            const double y = agent.labels(s);
            const double m = y * agent.samples.row(s).dot(x);
            g.noalias() += (-y * sigmoid_neg(m)) * agent.samples.row(s).transpose();
        }
        break;
    case AgentObjective::Family::sum_of_distances:
        for (const auto& anchor : agent.anchors) {
            const Eigen::VectorXd d = x - anchor;
            const double dist = d.norm();
            if (dist > 0.0) // zero-vector convention exactly at the kink
                g += d / dist;
        }
        break;
    }
    return g;
}

double objective_value(const ObjectiveSpec& spec, int i, const Eigen::VectorXd& x) {
    check_eval(spec, i, x);
    const AgentObjective& agent = spec.agents[static_cast<std::size_t>(i)];
    double value = 0.0;
    switch (agent.family) {
    case AgentObjective::Family::zero:
        break;
    case AgentObjective::Family::logistic:
        for (Eigen::Index s = 0; s < agent.samples.rows(); ++s)
            value += logistic_loss(agent.labels(s) * agent.samples.row(s).dot(x));
        break;
    case AgentObjective::Family::sum_of_distances:
        for (const auto& anchor : agent.anchors)
            value += (x - anchor).norm();
        break;
    }
    return value;
}

double global_objective(const ObjectiveSpec& spec, const Eigen::VectorXd& x) {
    double value = 0.0;
    for (int i = 0; i < spec.n; ++i)
        value += objective_value(spec, i, x);
    return value;
}

ObjectiveSpec make_logistic_synthetic(int n, int p, int samples_per_agent, std::uint64_t seed) {
    if (n < 1 || p < 1 || samples_per_agent < 1)
        throw config_error("synthetic logistic data needs n, p, samples_per_agent >= 1");
    Rng rng(seed);
    Eigen::VectorXd w(p);
    for (int d = 0; d < p; ++d)
        w(d) = rng.normal();
    std::vector<AgentObjective> agents(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        AgentObjective& agent = agents[static_cast<std::size_t>(i)];
        agent.family = AgentObjective::Family::logistic;
        agent.samples.resize(samples_per_agent, p);
        agent.labels.resize(samples_per_agent);
        for (int s = 0; s < samples_per_agent; ++s) {
            for (int d = 0; d < p; ++d)
                agent.samples(s, d) = rng.normal();
            double label = agent.samples.row(s).dot(w) >= 0.0 ? 1.0 : -1.0;
            if (rng.uniform() < 0.1)
                label = -label;
            agent.labels(s) = label;
        }
    }
    return make_objective(n, p, std::move(agents));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
    }
    return fields;
}

double parse_double(const std::string& text, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw config_error("line " + std::to_string(line_no) + ": bad number \"" + text + "\"");
    }
}

int parse_agent_index(const std::string& text, int n, int line_no) {
    const double v = parse_double(text, line_no);
    const int i = static_cast<int>(v);
    if (v != i || i < 0 || i >= n)
        throw config_error("line " + std::to_string(line_no) + ": bad agent index \"" + text +
                           "\"");
    return i;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open data file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

} // namespace

ObjectiveSpec load_logistic_csv(const std::string& path, int n) {
    const auto lines = read_lines(path);
    if (lines.empty())
        throw config_error(path + ": empty data file");
    auto header = split_csv_line(lines[0]);
    bool has_agent = !header.empty() && header[0] == "agent";
    const std::size_t label_col = has_agent ? 1 : 0;
    if (header.size() <= label_col || header[label_col] != "label")
        throw config_error(path + ": expected header \"[agent,] label, f_1..f_p\"");
    const int p = static_cast<int>(header.size() - label_col - 1);
    if (p < 1)
        throw config_error(path + ": no feature columns");

    std::vector<std::vector<Eigen::VectorXd>> features(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> labels(static_cast<std::size_t>(n));
    int row = 0;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto fields = split_csv_line(lines[li]);
        const int line_no = static_cast<int>(li) + 1;
        if (fields.size() != header.size())
            throw config_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields");
        const int agent =
            has_agent ? parse_agent_index(fields[0], n, line_no) : row % n;
        const double label = parse_double(fields[label_col], line_no);
        Eigen::VectorXd c(p);
        for (int d = 0; d < p; ++d)
            c(d) = parse_double(fields[label_col + 1 + static_cast<std::size_t>(d)], line_no);
        features[static_cast<std::size_t>(agent)].push_back(std::move(c));
        labels[static_cast<std::size_t>(agent)].push_back(label);
        ++row;
    }
    std::vector<AgentObjective> agents(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& agent = agents[static_cast<std::size_t>(i)];
        const auto& fi = features[static_cast<std::size_t>(i)];
        if (fi.empty())
            continue; // zero objective
        agent.family = AgentObjective::Family::logistic;
        agent.samples.resize(static_cast<Eigen::Index>(fi.size()), p);
        agent.labels.resize(static_cast<Eigen::Index>(fi.size()));
        for (std::size_t s = 0; s < fi.size(); ++s) {
            agent.samples.row(static_cast<Eigen::Index>(s)) = fi[s].transpose();
            agent.labels(static_cast<Eigen::Index>(s)) = labels[static_cast<std::size_t>(i)][s];
        }
    }
    return make_objective(n, p, std::move(agents));
}

ObjectiveSpec load_anchors_csv(const std::string& path, int n, int p) {
    const auto lines = read_lines(path);
    if (lines.empty())
        throw config_error(path + ": empty data file");
    const auto header = split_csv_line(lines[0]);
    if (header.empty() || header[0] != "agent" || static_cast<int>(header.size()) != p + 1)
        throw config_error(path + ": expected header \"agent, c_1..c_p\" with p = " +
                           std::to_string(p));
    std::vector<AgentObjective> agents(static_cast<std::size_t>(n));
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto fields = split_csv_line(lines[li]);
        const int line_no = static_cast<int>(li) + 1;
        if (fields.size() != header.size())
            throw config_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields");
        const int agent = parse_agent_index(fields[0], n, line_no);
        Eigen::VectorXd anchor(p);
        for (int d = 0; d < p; ++d)
            anchor(d) = parse_double(fields[1 + static_cast<std::size_t>(d)], line_no);
        auto& a = agents[static_cast<std::size_t>(agent)];
        a.family = AgentObjective::Family::sum_of_distances;
        a.anchors.push_back(std::move(anchor));
    }
    return make_objective(n, p, std::move(agents));
}

Optimum reference_optimum(const ObjectiveSpec& spec, const ConstraintSet& set, long long budget,
                          std::uint64_t seed) {
    if (budget < 1)
        throw config_error("reference solver needs a positive budget");
    if (set.p != spec.p)
        throw config_error("constraint set and objective dimensions differ");
    Rng rng(seed);
    Eigen::VectorXd x;
    switch (set.kind) {
    case ConstraintSet::Kind::ball:
        x = set.center;
        break;
    case ConstraintSet::Kind::box:
        x = 0.5 * (set.lower + set.upper);
        break;
    case ConstraintSet::Kind::whole_space:
        x = Eigen::VectorXd::Zero(spec.p);
        break;
    }
    for (int d = 0; d < spec.p; ++d)
        x(d) += 0.1 * rng.normal();
    x = project(set, x);

    const StepSchedule sched{1.0};
    Eigen::VectorXd best_x = x;
    double best_f = global_objective(spec, x);
    Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(spec.p);
    for (long long k = 0; k < budget; ++k) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(spec.p);
        for (int i = 0; i < spec.n; ++i)
            g += subgradient(spec, i, x);
        x = project(set, x - sched.alpha(k) * g);
        sum_x += x;
        const double f = global_objective(spec, x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    }
    // The average of feasible iterates is feasible (convexity); project anyway to
    // shed accumulation noise before the final comparison.
    const Eigen::VectorXd avg = project(set, sum_x / static_cast<double>(budget));
    const double avg_f = global_objective(spec, avg);
    if (avg_f < best_f)
        return Optimum{avg, avg_f};
    return Optimum{best_x, best_f};
}

Optimum clipped_median_optimum(const ObjectiveSpec& spec, double lo, double hi) {
    if (spec.p != 1)
        throw config_error("the clipped-median optimum is defined for p = 1 only");
    if (!(lo <= hi))
        throw config_error("empty interval");
    std::vector<double> values;
    for (const auto& agent : spec.agents) {
        if (agent.family == AgentObjective::Family::logistic)
            throw config_error("the clipped-median optimum needs sum-of-distances objectives");
        for (const auto& anchor : agent.anchors)
            values.push_back(anchor(0));
    }
    if (values.empty())
        throw config_error("no anchors: optimum is the whole interval");
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    // Minimizers of the unconstrained sum of |x - v| form the median interval;
    // clamping its midpoint into [lo, hi] lands on the constrained optimum.
    const double med_lo = values[(m - 1) / 2];
    const double med_hi = values[m / 2];
    const double x = std::min(std::max(0.5 * (med_lo + med_hi), lo), hi);
    double f = 0.0;
    for (double v : values)
        f += std::abs(x - v);
    Eigen::VectorXd x_star(1);
    x_star(0) = x;
    return Optimum{x_star, f};
}

} // namespace ddps
