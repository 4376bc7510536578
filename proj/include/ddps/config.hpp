#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddps/graph.hpp"
#include "ddps/oracle.hpp"
#include "ddps/projection.hpp"
#include "ddps/solver.hpp"
#include "ddps/weights.hpp"

namespace ddps {

// A complete run description, parsed from line-oriented "key = value" text
// ('#' lines are comments). serialize_config() round-trips losslessly through
// parse_config(). See the README for the key reference.
struct RunConfig {
    // Graph: a file takes precedence; otherwise the seeded generator.
    std::string graph_file;
    int graph_n = 0;
    double graph_extra_edge_prob = 0.0;
    std::uint64_t graph_seed = 0;

    // Problem family: "logistic" or "sum_of_distances".
    std::string problem;
    int p = 0;
    int samples_per_agent = 0;       // logistic synthesis
    std::uint64_t data_seed = 0;     // logistic synthesis
    std::string logistic_file;       // logistic from CSV instead of synthesis
    std::map<int, std::vector<Eigen::VectorXd>> anchors; // agent -> anchor list
    std::string anchors_file;        // anchors from CSV instead of inline keys

    // Constraint: "none", "ball" (center defaults to the origin), or "box"
    // (single bound values broadcast across dimensions).
    std::string constraint = "none";
    double ball_radius = 5.0;
    Eigen::VectorXd ball_center;
    Eigen::VectorXd box_lower, box_upper;

    double step_a = 1.0;

    bool epsilon_auto = true;
    double epsilon = 0.0;     // explicit value when epsilon_auto is false
    double epsilon_cap = 1e-3;

    long long iters = 0;
    int record_every = 100;
    std::uint64_t seed = 0;
    std::string out = "trace.csv";

    // f* provenance: "auto" (analytic clipped median when the problem is 1-D
    // sum-of-distances on a box, otherwise the centralized reference solver with
    // reference_budget_factor * iters steps) or "none" (gap column stays nan).
    std::string fstar = "auto";
    int reference_budget_factor = 10;

    std::string init = "zero"; // "zero" or "consensus"
    double init_value = 0.0;

    bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Everything run() needs, assembled and validated from a config.
struct RunInputs {
    DirectedGraph graph;
    ConstraintSet set;
    ObjectiveSpec spec;
    StepSchedule sched;
    EpsilonPolicy policy;
    RunOptions opts;
};

RunInputs materialize(const RunConfig& cfg);

} // namespace ddps
