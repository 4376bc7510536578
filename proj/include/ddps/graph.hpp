#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ddps {

// Directed communication topology. An edge (src, dst) means src can send to dst.
// Every node is implicitly its own in- and out-neighbor (the mixing weights need
// a_ii > 0 and b_ii > 0), so self-loops are never stored and explicit self-loop
// input is rejected rather than silently merged.
struct DirectedGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges; // sorted, unique, no self-loops
};

// Validates indices, rejects self-loops, sorts and dedupes the edge set.
DirectedGraph make_graph(int n, std::vector<std::pair<int, int>> edges);

// True iff every ordered node pair is joined by a directed path. Two reachability
// sweeps: forward from node 0 and forward from node 0 in the edge-reversed graph.
bool is_strongly_connected(const DirectedGraph& g);

// Random digraph that is strongly connected by construction: a Hamiltonian cycle
// through a shuffled node order, plus each remaining ordered pair independently
// with probability extra_edge_prob. Deterministic in seed.
DirectedGraph random_strongly_connected(int n, double extra_edge_prob, std::uint64_t seed);

// Sorted ascending; both always contain i itself.
std::vector<int> in_neighbors(const DirectedGraph& g, int i);
std::vector<int> out_neighbors(const DirectedGraph& g, int i);

// Edge-list text format: one "src dst" pair per line, '#' lines are comments,
// an optional "n <count>" header fixes the node count (otherwise max index + 1).
DirectedGraph parse_edge_list(const std::string& text);
std::string format_edge_list(const DirectedGraph& g);
DirectedGraph load_edge_list(const std::string& path);
void save_edge_list(const DirectedGraph& g, const std::string& path);

} // namespace ddps
