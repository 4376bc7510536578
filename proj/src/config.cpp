#include "ddps/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddps/errors.hpp"

namespace ddps {

namespace {

bool vectors_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

} // namespace

bool RunConfig::operator==(const RunConfig& other) const {
    auto anchors_equal = [&] {
        if (anchors.size() != other.anchors.size())
            return false;
        for (const auto& [agent, list] : anchors) {
            auto it = other.anchors.find(agent);
            if (it == other.anchors.end() || it->second.size() != list.size())
                return false;
            for (std::size_t a = 0; a < list.size(); ++a)
                if (!vectors_equal(list[a], it->second[a]))
                    return false;
        }
        return true;
    };
    return graph_file == other.graph_file && graph_n == other.graph_n &&
           graph_extra_edge_prob == other.graph_extra_edge_prob &&
           graph_seed == other.graph_seed && problem == other.problem && p == other.p &&
           samples_per_agent == other.samples_per_agent && data_seed == other.data_seed &&
           logistic_file == other.logistic_file && anchors_equal() &&
           anchors_file == other.anchors_file && constraint == other.constraint &&
           ball_radius == other.ball_radius && vectors_equal(ball_center, other.ball_center) &&
           vectors_equal(box_lower, other.box_lower) &&
           vectors_equal(box_upper, other.box_upper) && step_a == other.step_a &&
           epsilon_auto == other.epsilon_auto && epsilon == other.epsilon &&
           epsilon_cap == other.epsilon_cap && iters == other.iters &&
           record_every == other.record_every && seed == other.seed && out == other.out &&
           fstar == other.fstar && reference_budget_factor == other.reference_budget_factor &&
           init == other.init && init_value == other.init_value;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& value, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("line " + std::to_string(line_no) + ": bad number \"" + value + "\"");
    }
}

long long to_int(const std::string& value, int line_no) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("line " + std::to_string(line_no) + ": bad integer \"" + value + "\"");
    }
}

std::uint64_t to_seed(const std::string& value, int line_no) {
    try {
        std::size_t used = 0;
        // stoull silently wraps negative input; reject it up front.
        if (value.find('-') != std::string::npos)
            throw std::invalid_argument(value);
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("line " + std::to_string(line_no) + ": bad seed \"" + value + "\"");
    }
}

Eigen::VectorXd to_vector(const std::string& value, int line_no) {
    std::istringstream in(value);
    std::vector<double> parts;
    std::string token;
    while (in >> token)
        parts.push_back(to_double(token, line_no));
    Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = parts[i];
    return v;
}

// "x1 x2 ; x1 x2 ; ..." -> one vector per ';' group.
std::vector<Eigen::VectorXd> to_anchor_list(const std::string& value, int line_no) {
    std::vector<Eigen::VectorXd> list;
    std::istringstream in(value);
    std::string group;
    while (std::getline(in, group, ';')) {
        const std::string t = trim(group);
        if (t.empty())
            throw config_error("line " + std::to_string(line_no) + ": empty anchor group");
        list.push_back(to_vector(t, line_no));
    }
    if (list.empty())
        throw config_error("line " + std::to_string(line_no) + ": empty anchor list");
    return list;
}

std::string format_double(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

std::string format_vector(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i)
            out += " ";
        out += format_double(v(i));
    }
    return out;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) + ": expected \"key = value\"");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("line " + std::to_string(line_no) + ": empty key or value");

        if (key == "graph_file")
            cfg.graph_file = value;
        else if (key == "graph_n")
            cfg.graph_n = static_cast<int>(to_int(value, line_no));
        else if (key == "graph_extra_edge_prob")
            cfg.graph_extra_edge_prob = to_double(value, line_no);
        else if (key == "graph_seed")
            cfg.graph_seed = to_seed(value, line_no);
        else if (key == "problem")
            cfg.problem = value;
        else if (key == "p")
            cfg.p = static_cast<int>(to_int(value, line_no));
        else if (key == "samples_per_agent")
            cfg.samples_per_agent = static_cast<int>(to_int(value, line_no));
        else if (key == "data_seed")
            cfg.data_seed = to_seed(value, line_no);
        else if (key == "logistic_file")
            cfg.logistic_file = value;
        else if (key == "anchors_file")
            cfg.anchors_file = value;
        else if (key.rfind("anchors_", 0) == 0) {
            const std::string index = key.substr(8);
            try {
                std::size_t used = 0;
                const int agent = std::stoi(index, &used);
                if (used != index.size() || agent < 0)
                    throw std::invalid_argument(index);
                cfg.anchors[agent] = to_anchor_list(value, line_no);
            } catch (const config_error&) {
                throw;
            } catch (const std::exception&) {
                throw config_error("line " + std::to_string(line_no) + ": bad agent index in \"" +
                                   key + "\"");
            }
        } else if (key == "constraint")
            cfg.constraint = value;
        else if (key == "ball_radius")
            cfg.ball_radius = to_double(value, line_no);
        else if (key == "ball_center")
            cfg.ball_center = to_vector(value, line_no);
        else if (key == "box_lower")
            cfg.box_lower = to_vector(value, line_no);
        else if (key == "box_upper")
            cfg.box_upper = to_vector(value, line_no);
        else if (key == "step_a")
            cfg.step_a = to_double(value, line_no);
        else if (key == "epsilon") {
            if (value == "auto") {
                cfg.epsilon_auto = true;
                cfg.epsilon = 0.0;
            } else {
                cfg.epsilon_auto = false;
                cfg.epsilon = to_double(value, line_no);
            }
        } else if (key == "epsilon_cap")
            cfg.epsilon_cap = to_double(value, line_no);
        else if (key == "iters")
            cfg.iters = to_int(value, line_no);
        else if (key == "record_every")
            cfg.record_every = static_cast<int>(to_int(value, line_no));
        else if (key == "seed")
            cfg.seed = to_seed(value, line_no);
        else if (key == "out")
            cfg.out = value;
        else if (key == "fstar")
            cfg.fstar = value;
        else if (key == "reference_budget_factor")
            cfg.reference_budget_factor = static_cast<int>(to_int(value, line_no));
        else if (key == "init")
            cfg.init = value;
        else if (key == "init_value")
            cfg.init_value = to_double(value, line_no);
        else
            throw config_error("line " + std::to_string(line_no) + ": unknown key \"" + key +
                               "\"");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    if (!cfg.graph_file.empty())
        out << "graph_file = " << cfg.graph_file << "\n";
    out << "graph_n = " << cfg.graph_n << "\n";
    out << "graph_extra_edge_prob = " << format_double(cfg.graph_extra_edge_prob) << "\n";
    out << "graph_seed = " << cfg.graph_seed << "\n";
    if (!cfg.problem.empty())
        out << "problem = " << cfg.problem << "\n";
    out << "p = " << cfg.p << "\n";
    out << "samples_per_agent = " << cfg.samples_per_agent << "\n";
    out << "data_seed = " << cfg.data_seed << "\n";
    if (!cfg.logistic_file.empty())
        out << "logistic_file = " << cfg.logistic_file << "\n";
    for (const auto& [agent, list] : cfg.anchors) {
        out << "anchors_" << agent << " = ";
        for (std::size_t a = 0; a < list.size(); ++a) {
            if (a)
                out << " ; ";
            out << format_vector(list[a]);
        }
        out << "\n";
    }
    if (!cfg.anchors_file.empty())
        out << "anchors_file = " << cfg.anchors_file << "\n";
    out << "constraint = " << cfg.constraint << "\n";
    out << "ball_radius = " << format_double(cfg.ball_radius) << "\n";
    if (cfg.ball_center.size() > 0)
        out << "ball_center = " << format_vector(cfg.ball_center) << "\n";
    if (cfg.box_lower.size() > 0)
        out << "box_lower = " << format_vector(cfg.box_lower) << "\n";
    if (cfg.box_upper.size() > 0)
        out << "box_upper = " << format_vector(cfg.box_upper) << "\n";
    out << "step_a = " << format_double(cfg.step_a) << "\n";
    if (cfg.epsilon_auto)
        out << "epsilon = auto\n";
    else
        out << "epsilon = " << format_double(cfg.epsilon) << "\n";
    out << "epsilon_cap = " << format_double(cfg.epsilon_cap) << "\n";
    out << "iters = " << cfg.iters << "\n";
    out << "record_every = " << cfg.record_every << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "out = " << cfg.out << "\n";
    out << "fstar = " << cfg.fstar << "\n";
    out << "reference_budget_factor = " << cfg.reference_budget_factor << "\n";
    out << "init = " << cfg.init << "\n";
    out << "init_value = " << format_double(cfg.init_value) << "\n";
    return out.str();
}

namespace {

Eigen::VectorXd broadcast(const Eigen::VectorXd& v, int p, const std::string& what) {
    if (v.size() == p)
        return v;
    if (v.size() == 1)
        return Eigen::VectorXd::Constant(p, v(0));
    throw config_error(what + " needs 1 or p = " + std::to_string(p) + " values, got " +
                       std::to_string(v.size()));
}

} // namespace

RunInputs materialize(const RunConfig& cfg) {
    RunInputs inputs;

    if (!cfg.graph_file.empty())
        inputs.graph = load_edge_list(cfg.graph_file);
    else if (cfg.graph_n >= 1)
        inputs.graph =
            random_strongly_connected(cfg.graph_n, cfg.graph_extra_edge_prob, cfg.graph_seed);
    else
        throw config_error("config needs graph_file or graph_n");
    if (!is_strongly_connected(inputs.graph))
        throw config_error("graph is not strongly connected");
    const int n = inputs.graph.n;

    if (cfg.p < 1)
        throw config_error("config needs p >= 1");
    if (cfg.problem == "logistic") {
        if (!cfg.logistic_file.empty()) {
            inputs.spec = load_logistic_csv(cfg.logistic_file, n);
            if (inputs.spec.p != cfg.p)
                throw config_error("logistic file dimension " + std::to_string(inputs.spec.p) +
                                   " != configured p = " + std::to_string(cfg.p));
        } else {
            if (cfg.samples_per_agent < 1)
                throw config_error("logistic synthesis needs samples_per_agent >= 1");
            inputs.spec =
                make_logistic_synthetic(n, cfg.p, cfg.samples_per_agent, cfg.data_seed);
        }
    } else if (cfg.problem == "sum_of_distances") {
        if (!cfg.anchors_file.empty()) {
            inputs.spec = load_anchors_csv(cfg.anchors_file, n, cfg.p);
        } else {
            std::vector<AgentObjective> agents(static_cast<std::size_t>(n));
            for (const auto& [agent, list] : cfg.anchors) {
                if (agent >= n)
                    throw config_error("anchors_" + std::to_string(agent) +
                                       " exceeds agent count " + std::to_string(n));
                agents[static_cast<std::size_t>(agent)].family =
                    AgentObjective::Family::sum_of_distances;
                agents[static_cast<std::size_t>(agent)].anchors = list;
            }
            inputs.spec = make_objective(n, cfg.p, std::move(agents));
        }
    } else {
        throw config_error("problem must be \"logistic\" or \"sum_of_distances\", got \"" +
                           cfg.problem + "\"");
    }

    if (cfg.constraint == "none") {
        inputs.set = whole_space(cfg.p);
    } else if (cfg.constraint == "ball") {
        Eigen::VectorXd center = cfg.ball_center.size() == 0
                                     ? Eigen::VectorXd::Zero(cfg.p)
                                     : broadcast(cfg.ball_center, cfg.p, "ball_center");
        inputs.set = ball(std::move(center), cfg.ball_radius);
    } else if (cfg.constraint == "box") {
        if (cfg.box_lower.size() == 0 || cfg.box_upper.size() == 0)
            throw config_error("box constraint needs box_lower and box_upper");
        inputs.set = box(broadcast(cfg.box_lower, cfg.p, "box_lower"),
                         broadcast(cfg.box_upper, cfg.p, "box_upper"));
    } else {
        throw config_error("constraint must be \"none\", \"ball\", or \"box\", got \"" +
                           cfg.constraint + "\"");
    }

    if (!(cfg.step_a > 0.0))
        throw config_error("step_a must be positive");
    inputs.sched = StepSchedule{cfg.step_a};

    inputs.policy.is_auto = cfg.epsilon_auto;
    inputs.policy.value = cfg.epsilon;
    inputs.policy.cap = cfg.epsilon_cap;

    if (cfg.iters < 1)
        throw config_error("config needs iters >= 1");
    inputs.opts.K = cfg.iters;
    inputs.opts.record_every = cfg.record_every;
    inputs.opts.seed = cfg.seed;
    if (cfg.init == "consensus") {
        inputs.opts.consensus_init = true;
        inputs.opts.consensus_value = cfg.init_value;
    } else if (cfg.init != "zero") {
        throw config_error("init must be \"zero\" or \"consensus\"");
    }

    if (cfg.fstar == "auto") {
        const bool analytic = cfg.problem == "sum_of_distances" && cfg.p == 1 &&
                              cfg.constraint == "box";
        Optimum opt;
        if (analytic) {
            opt = clipped_median_optimum(inputs.spec, inputs.set.lower(0), inputs.set.upper(0));
        } else {
            if (cfg.reference_budget_factor < 1)
                throw config_error("reference_budget_factor must be >= 1");
            // Decorrelate the reference start from every other stream this seed feeds.
            const std::uint64_t ref_seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
            opt = reference_optimum(inputs.spec, inputs.set,
                                    cfg.iters * cfg.reference_budget_factor, ref_seed);
        }
        inputs.opts.x_star = opt.x_star;
        inputs.opts.f_star = opt.f_star;
    } else if (cfg.fstar != "none") {
        throw config_error("fstar must be \"auto\" or \"none\"");
    }

    return inputs;
}

} // namespace ddps
