#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <string>

#include "ddps/config.hpp"
#include "ddps/errors.hpp"

using namespace ddps;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

} // namespace

TEST_CASE("defaults round-trip through text") {
    RunConfig cfg;
    CHECK(parse_config(serialize_config(cfg)) == cfg);
}

TEST_CASE("a fully populated config round-trips losslessly") {
    RunConfig cfg;
    cfg.graph_file = "topo.txt";
    cfg.graph_n = 7;
    cfg.graph_extra_edge_prob = 0.12345678901234567;
    cfg.graph_seed = 12345678901234567ull;
    cfg.problem = "sum_of_distances";
    cfg.p = 3;
    cfg.samples_per_agent = 11;
    cfg.data_seed = 99;
    cfg.anchors[0] = {vec1(0.1), vec1(-2.5)};
    Eigen::VectorXd a3(3);
    a3 << 1.0 / 3.0, -7.25, 1e-9;
    cfg.anchors[4] = {a3};
    cfg.constraint = "box";
    cfg.box_lower = vec1(-1.5);
    Eigen::VectorXd up(3);
    up << 2.0, 3.0, 4.0;
    cfg.box_upper = up;
    cfg.step_a = 2.02;
    cfg.epsilon_auto = false;
    cfg.epsilon = 0.02;
    cfg.epsilon_cap = 0.5;
    cfg.iters = 100000;
    cfg.record_every = 250;
    cfg.seed = 31337;
    cfg.out = "runs/median.csv";
    cfg.fstar = "none";
    cfg.reference_budget_factor = 3;
    cfg.init = "consensus";
    cfg.init_value = -0.25;
    CHECK(parse_config(serialize_config(cfg)) == cfg);

    RunConfig ballish;
    ballish.problem = "logistic";
    ballish.constraint = "ball";
    ballish.ball_radius = 20.0;
    ballish.ball_center = vec1(0.5);
    ballish.logistic_file = "data.csv";
    ballish.anchors_file = "anchors.csv";
    CHECK(parse_config(serialize_config(ballish)) == ballish);
}

TEST_CASE("comments, blanks, and spacing are tolerated") {
    auto cfg = parse_config("# a run\n"
                            "\n"
                            "  graph_n   =  4 \n"
                            "problem = logistic\n"
                            "# trailing comment line\n"
                            "epsilon = auto\n");
    CHECK(cfg.graph_n == 4);
    CHECK(cfg.problem == "logistic");
    CHECK(cfg.epsilon_auto);
}

TEST_CASE("explicit epsilon parses as a number") {
    auto cfg = parse_config("epsilon = 0.0125\n");
    CHECK_FALSE(cfg.epsilon_auto);
    CHECK(cfg.epsilon == 0.0125);
}

TEST_CASE("anchor lists split on semicolons") {
    auto cfg = parse_config("anchors_2 = 1.0 2.0 ; 3.0 4.0 ; -1 -2\n");
    REQUIRE(cfg.anchors.count(2) == 1);
    REQUIRE(cfg.anchors[2].size() == 3);
    CHECK(cfg.anchors[2][1](0) == 3.0);
    CHECK(cfg.anchors[2][2](1) == -2.0);
}

TEST_CASE("parse errors carry line numbers") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_config(text);
            FAIL("expected a config error for: " << text);
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("graph_n = 3\nnot a pair\n", "line 2");
    expect_error("bogus_key = 1\n", "unknown key");
    expect_error("p = twelve\n", "bad integer");
    expect_error("step_a = 1..5\n", "bad number");
    expect_error("graph_n =\n", "empty key or value");
    expect_error("anchors_x = 1\n", "bad agent index");
    expect_error("anchors_-1 = 1\n", "bad agent index");
    expect_error("anchors_0 = 1 ;; 2\n", "empty anchor group");
    expect_error("seed = -1\n", "bad seed");
}

TEST_CASE("load_config reports missing files") {
    CHECK_THROWS_AS(load_config("/tmp/ddps_missing_config.cfg"), config_error);
}

TEST_CASE("materialize assembles a generated-graph median run") {
    auto cfg = parse_config("graph_n = 3\n"
                            "graph_extra_edge_prob = 1.0\n"
                            "problem = sum_of_distances\n"
                            "p = 1\n"
                            "anchors_0 = 0\n"
                            "anchors_1 = 1\n"
                            "anchors_2 = 5\n"
                            "constraint = box\n"
                            "box_lower = 2\n"
                            "box_upper = 10\n"
                            "epsilon = 0.02\n"
                            "iters = 100\n");
    auto inputs = materialize(cfg);
    CHECK(inputs.graph.n == 3);
    CHECK(inputs.spec.n == 3);
    CHECK(inputs.spec.p == 1);
    CHECK(inputs.set.kind == ConstraintSet::Kind::box);
    CHECK(inputs.opts.K == 100);
    CHECK_FALSE(inputs.policy.is_auto);
    CHECK(inputs.policy.value == 0.02);
    // 1-D sum of distances on a box: f* comes from the clipped median, exactly.
    REQUIRE(inputs.opts.f_star.has_value());
    CHECK(*inputs.opts.f_star == 6.0);
    REQUIRE(inputs.opts.x_star.has_value());
    CHECK((*inputs.opts.x_star)(0) == 2.0);

    // Single box bounds broadcast across dimensions.
    cfg.p = 2;
    cfg.anchors.clear();
    Eigen::VectorXd a2(2);
    a2 << 0.0, 1.0;
    cfg.anchors[0] = {a2};
    cfg.fstar = "none";
    auto wide = materialize(cfg);
    CHECK(wide.set.lower.size() == 2);
    CHECK(wide.set.lower(1) == 2.0);
    CHECK(wide.set.upper(0) == 10.0);
    CHECK_FALSE(wide.opts.f_star.has_value());
    CHECK_FALSE(wide.opts.x_star.has_value());
}

TEST_CASE("materialize assembles a synthetic logistic run") {
    auto cfg = parse_config("graph_n = 4\n"
                            "graph_seed = 5\n"
                            "problem = logistic\n"
                            "p = 2\n"
                            "samples_per_agent = 3\n"
                            "data_seed = 8\n"
                            "constraint = ball\n"
                            "ball_radius = 4\n"
                            "iters = 40\n"
                            "reference_budget_factor = 2\n"
                            "init = consensus\n"
                            "init_value = 0.5\n");
    auto inputs = materialize(cfg);
    CHECK(inputs.spec.n == 4);
    CHECK(inputs.spec.agents[0].samples.rows() == 3);
    CHECK(inputs.set.kind == ConstraintSet::Kind::ball);
    CHECK(inputs.set.radius == 4.0);
    CHECK(inputs.opts.consensus_init);
    CHECK(inputs.opts.consensus_value == 0.5);
    CHECK(inputs.policy.is_auto);
    // The reference solver supplied an estimate; it can't beat the infimum over
    // the ball by construction, and it must be a finite value.
    REQUIRE(inputs.opts.f_star.has_value());
    CHECK(std::isfinite(*inputs.opts.f_star));
}

TEST_CASE("materialize reads graph and data files") {
    const auto graph_path = write_temp("ddps_cfg_graph.txt", "n 2\n0 1\n1 0\n");
    const auto data_path = write_temp("ddps_cfg_logistic.csv", "agent, label, f_1\n"
                                                               "0, 1, 0.5\n"
                                                               "1, -1, -0.5\n");
    RunConfig cfg;
    cfg.graph_file = graph_path;
    cfg.problem = "logistic";
    cfg.p = 1;
    cfg.logistic_file = data_path;
    cfg.iters = 10;
    cfg.fstar = "none";
    auto inputs = materialize(cfg);
    CHECK(inputs.graph.n == 2);
    CHECK(inputs.spec.agents[1].labels(0) == -1.0);

    cfg.p = 3; // disagrees with the file
    CHECK_THROWS_AS(materialize(cfg), config_error);

    const auto bad_graph = write_temp("ddps_cfg_bad_graph.txt", "n 3\n0 1\n1 0\n");
    cfg.p = 1;
    cfg.graph_file = bad_graph; // node 2 is unreachable
    CHECK_THROWS_AS(materialize(cfg), config_error);
}

TEST_CASE("materialize validation errors") {
    auto base = [] {
        RunConfig cfg;
        cfg.graph_n = 3;
        cfg.problem = "sum_of_distances";
        cfg.p = 1;
        cfg.anchors[0] = {vec1(1.0)};
        cfg.iters = 10;
        cfg.fstar = "none";
        return cfg;
    };
    {
        RunConfig cfg = base();
        cfg.graph_n = 0;
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.problem = "quadratic";
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.p = 0;
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.anchors[7] = {vec1(0.0)}; // only 3 agents exist
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.constraint = "simplex";
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.constraint = "box"; // bounds missing
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.step_a = 0.0;
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.iters = 0;
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.init = "warm";
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.fstar = "exact";
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.problem = "logistic"; // no samples_per_agent, no file
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
    {
        RunConfig cfg = base();
        cfg.fstar = "auto";
        cfg.reference_budget_factor = 0;
        cfg.constraint = "ball"; // forces the reference-solver path
        CHECK_THROWS_AS(materialize(cfg), config_error);
    }
}
