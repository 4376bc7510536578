#include "ddps/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ddps/errors.hpp"
#include "ddps/rng.hpp"

namespace ddps {

DirectedGraph make_graph(int n, std::vector<std::pair<int, int>> edges) {
    if (n < 1)
        throw config_error("graph needs at least one node");
    for (const auto& [src, dst] : edges) {
        if (src < 0 || src >= n || dst < 0 || dst >= n)
            throw config_error("edge (" + std::to_string(src) + ", " + std::to_string(dst) +
                               ") out of range for n = " + std::to_string(n));
        if (src == dst)
            throw config_error("explicit self-loop on node " + std::to_string(src) +
                               " (self-loops are implicit)");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return DirectedGraph{n, std::move(edges)};
}

namespace {

std::vector<std::vector<int>> adjacency(const DirectedGraph& g, bool reversed) {
    std::vector<std::vector<int>> adj(g.n);
    for (const auto& [src, dst] : g.edges) {
        if (reversed)
            adj[dst].push_back(src);
        else
            adj[src].push_back(dst);
    }
    return adj;
}

int reachable_count(const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count;
}

} // namespace

bool is_strongly_connected(const DirectedGraph& g) {
    if (g.n == 1)
        return true;
    return reachable_count(adjacency(g, false)) == g.n &&
           reachable_count(adjacency(g, true)) == g.n;
}

DirectedGraph random_strongly_connected(int n, double extra_edge_prob, std::uint64_t seed) {
    if (n < 1)
        throw config_error("graph needs at least one node");
    if (extra_edge_prob < 0.0 || extra_edge_prob > 1.0)
        throw config_error("extra_edge_prob must lie in [0, 1]");
    Rng rng(seed);

    // Fisher-Yates over the node order, then close it into a directed cycle.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
    if (n > 1) {
        for (int i = 0; i < n; ++i) {
            int src = order[i];
            int dst = order[(i + 1) % n];
            edges.emplace_back(src, dst);
            present[src][dst] = 1;
        }
    }
    // One uniform draw per remaining ordered pair, in fixed (src, dst) order, so
    // the stream consumed is independent of extra_edge_prob.
    for (int src = 0; src < n; ++src) {
        for (int dst = 0; dst < n; ++dst) {
            if (src == dst || present[src][dst])
                continue;
            if (rng.uniform() < extra_edge_prob)
                edges.emplace_back(src, dst);
        }
    }
    return make_graph(n, std::move(edges));
}

namespace {

std::vector<int> neighbors_of(const DirectedGraph& g, int i, bool incoming) {
    if (i < 0 || i >= g.n)
        throw config_error("node index " + std::to_string(i) + " out of range");
    std::vector<int> result{i};
    for (const auto& [src, dst] : g.edges) {
        if (incoming && dst == i)
            result.push_back(src);
        else if (!incoming && src == i)
            result.push_back(dst);
    }
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace

std::vector<int> in_neighbors(const DirectedGraph& g, int i) {
    return neighbors_of(g, i, true);
}

std::vector<int> out_neighbors(const DirectedGraph& g, int i) {
    return neighbors_of(g, i, false);
}

DirectedGraph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    int header_n = -1;
    int max_index = -1;
    std::vector<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        if (token == "n") {
            if (header_n >= 0)
                throw config_error("line " + std::to_string(line_no) + ": duplicate header");
            if (!(fields >> header_n) || header_n < 1)
                throw config_error("line " + std::to_string(line_no) + ": bad node count");
            continue;
        }
        int src, dst;
        std::istringstream pair_in(line);
        std::string trailing;
        if (!(pair_in >> src >> dst) || (pair_in >> trailing))
            throw config_error("line " + std::to_string(line_no) +
                               ": expected \"src dst\", got \"" + line + "\"");
        if (src == dst)
            throw config_error("line " + std::to_string(line_no) + ": self-loop on node " +
                               std::to_string(src) + " (self-loops are implicit)");
        if (src < 0 || dst < 0)
            throw config_error("line " + std::to_string(line_no) + ": negative node index");
        edges.emplace_back(src, dst);
        max_index = std::max({max_index, src, dst});
    }
    const int n = header_n >= 0 ? header_n : max_index + 1;
    if (n < 1)
        throw config_error("edge list is empty and has no \"n <count>\" header");
    return make_graph(n, std::move(edges));
}

std::string format_edge_list(const DirectedGraph& g) {
    std::ostringstream out;
    out << "n " << g.n << "\n";
    for (const auto& [src, dst] : g.edges)
        out << src << " " << dst << "\n";
    return out.str();
}

DirectedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open graph file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_edge_list(buffer.str());
}

void save_edge_list(const DirectedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw config_error("cannot write graph file: " + path);
    out << format_edge_list(g);
}

} // namespace ddps
