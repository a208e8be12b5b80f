#ifndef GRAPHSEQ_GRAPH_HPP
#define GRAPHSEQ_GRAPH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace graphseq {

using Edge = std::pair<int, int>;  // canonical: first < second

// Undirected labeled graph. Immutable after construction by convention:
// build through make_graph and treat the result as read-only shared data.
struct Graph {
    int node_count = 0;
    std::vector<std::vector<int>> adjacency;  // sorted neighbor lists, symmetric
    std::vector<std::string> node_labels;     // empty, or one label per node
    std::map<Edge, std::string> edge_labels;  // optional, keyed by canonical edge

    bool labeled() const { return !node_labels.empty(); }
    bool has_edge(int a, int b) const;
    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
    int edge_count() const;
    std::vector<Edge> edges() const;  // canonical, sorted
};

inline Edge canonical_edge(int a, int b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Validates symmetry, index range, no self-loops/parallel edges.
Graph make_graph(int node_count, const std::vector<Edge>& edges,
                 std::vector<std::string> node_labels = {});

// True iff every node is reachable from node 0 (vacuously true when empty).
bool is_connected(const Graph& g);

// All edges whose removal disconnects g, canonical and sorted.
// Single-pass low-link traversal; throws ValidationError on disconnected input.
std::vector<Edge> find_bridges(const Graph& g);

enum class EdgeConnectivity { one_edge_connected, two_edge_connected, higher };

// Requires g connected with at least 2 nodes.
EdgeConnectivity edge_connectivity_class(const Graph& g);

const char* to_string(EdgeConnectivity c);

// A minimal edge cut: removing crossing_edges splits g into exactly the two
// internally connected sides. side_a holds the endpoint of the first crossing
// edge with the smaller index.
struct CutResult {
    std::vector<Edge> crossing_edges;  // 1 or 2 edges, canonical, sorted
    std::vector<int> side_a;           // sorted node ids
    std::vector<int> side_b;
};

// All cuts of g's minimal crossing size, provided that size is <= max_size
// (max_size is 1 or 2); empty list otherwise. Brute force over edge pairs for
// size 2 — fine at the <= ~50 node scale this toolkit targets.
std::vector<CutResult> enumerate_min_cuts(const Graph& g, int max_size);

// Vertex-induced subgraph on `nodes` (sorted, distinct), relabeled densely.
// original[i] is the id in the host graph of subgraph node i.
struct InducedSubgraph {
    Graph graph;
    std::vector<int> original;
};

InducedSubgraph induced_subgraph(const Graph& g, std::vector<int> nodes);

// Sum of shortest-path edge counts over unordered node pairs.
long long wiener_index(const Graph& g);

// Uniformly random labeled tree via a random parent-code (Pruefer) draw.
Graph random_tree(int n, std::uint64_t seed);

// Random tree plus extra_edges distinct non-tree edges chosen uniformly.
Graph random_connected_graph(int n, int extra_edges, std::uint64_t seed);

}  // namespace graphseq

#endif  // GRAPHSEQ_GRAPH_HPP
