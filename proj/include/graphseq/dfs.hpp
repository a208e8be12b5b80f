#ifndef GRAPHSEQ_DFS_HPP
#define GRAPHSEQ_DFS_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "graphseq/graph.hpp"

namespace graphseq {

inline constexpr int kDefaultOracleMaxNodes = 8;

// A valid DFS visit sequence over a graph, with its DFS tree.
// parent_of is indexed by node id; -1 marks the root (and unvisited nodes
// when the ordering covers a subgraph).
struct Ordering {
    std::vector<int> visit_sequence;
    std::vector<int> parent_of;

    int last() const { return visit_sequence.back(); }
};

// Two distinct valid orderings of the same graph sharing their final vertex.
struct TrajectoryPair {
    Ordering first;
    Ordering second;
    int common_end = -1;
};

// Checks whether seq is realizable as a DFS pre-order of g. Backtracking pops
// are forced: a node is popped only when it has no unvisited neighbors, and
// the next element must be an unvisited neighbor of the resulting stack top.
// Returns the ordering with its DFS-tree parents, or nullopt.
// Amortized linear in nodes plus edges.
std::optional<Ordering> check_ordering(const Graph& g, const std::vector<int>& seq);

bool is_valid_ordering(const Graph& g, const std::vector<int>& seq);

// Stochastic DFS: root uniform over nodes when unspecified, each next child
// uniform among the current top's unvisited neighbors. Deterministic per seed.
Ordering sample_ordering(const Graph& g, std::optional<int> root, std::uint64_t seed);

// Exhaustive S(G) via backtracking over every root and child choice.
// Oracle-only: throws when node_count exceeds the bound.
std::set<std::vector<int>> enumerate_orderings(const Graph& g,
                                               int oracle_max_nodes = kDefaultOracleMaxNodes);

// S(G, v): the subset of S(G) whose last element is v.
std::set<std::vector<int>> enumerate_orderings_ending_at(
    const Graph& g, int v, int oracle_max_nodes = kDefaultOracleMaxNodes);

// All vertex sets that appear as a prefix of some valid ordering, as bitmasks.
// Oracle-only; requires node_count <= min(bound, 63).
std::set<std::uint64_t> enumerate_prefix_supports(const Graph& g,
                                                  int oracle_max_nodes = kDefaultOracleMaxNodes);

// A DFS run truncated at a uniform length k in [1, n], together with the
// vertex-induced subgraph on the visited prefix, relabeled densely.
// original_index maps subgraph node ids back to ids in g.
struct InducedSubgraphSample {
    Graph subgraph;
    Ordering ordering;  // over subgraph node ids
    std::vector<int> original_index;
};

InducedSubgraphSample sample_dfs_induced_subgraph(const Graph& g, std::uint64_t seed);

// True iff some prefix of some full valid ordering of g covers exactly `nodes`
// and is itself a valid ordering of the vertex-induced subgraph on `nodes`.
// Exhaustive oracle; throws above the bound.
bool is_dfs_induced(const Graph& g, const std::vector<int>& nodes,
                    int oracle_max_nodes = kDefaultOracleMaxNodes);

struct PairOptions {
    // attempts per (cut, orientation) when rejection-sampling end-constrained
    // traversals of a 2-cut side
    int rejection_budget = 200;
};

// Glued pair across a single-crossing-edge cut (u,v): both sequences start at
// v, continue with a DFS ordering of the u-side rooted at u, and share the
// fixed remainder of one DFS ordering of the v-side rooted at v. The two
// u-side orderings differ; both results end at the v-side ordering's last
// vertex. Throws "no branching on cut side" when the u-side admits a single
// ordering from u, and "degenerate suffix side" when the v-side is a single
// node (either way the caller retries with the other orientation or cut).
TrajectoryPair common_end_pair_bridge(const Graph& g, const CutResult& cut,
                                      std::uint64_t seed);

// Pair across a minimal 2-cut of a 2-edge-connected non-cycle graph: two
// distinct DFS orderings of one side rooted at one crossing endpoint and
// ending at the other (found by rejection sampling), each glued with a fixed
// DFS ordering of the opposite side entered over the second crossing edge.
TrajectoryPair common_end_pair_two_connected(const Graph& g, std::uint64_t seed,
                                             const PairOptions& opts = {});

// Dispatcher over the constructions above plus the simple-cycle special case
// (two orderings rooted at the two neighbors of a vertex, traversing away
// from it, both ending at it).
TrajectoryPair common_end_pair_any(const Graph& g, std::uint64_t seed,
                                   const PairOptions& opts = {});

// Up to `count` distinct valid orderings sharing their final vertex: picks a
// cut plan uniformly among the indexed eligible ones, fixes the suffix-side
// ordering and collects distinct varying-side orderings. Returns fewer than
// `count` when the plan admits fewer. Throws "graph admits no heuristic pair"
// when no cut is eligible.
std::vector<Ordering> trajectory_set(const Graph& g, int count, std::uint64_t seed,
                                     const PairOptions& opts = {});

}  // namespace graphseq

#endif  // GRAPHSEQ_DFS_HPP
