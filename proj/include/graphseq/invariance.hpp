#ifndef GRAPHSEQ_INVARIANCE_HPP
#define GRAPHSEQ_INVARIANCE_HPP

#include "graphseq/dfs.hpp"
#include "graphseq/graph.hpp"
#include "graphseq/recurrent.hpp"

namespace graphseq {

// Exhaustive total-structure-invariance diagnostic: enumerates every
// DFS-reachable prefix vertex set of g, and for every end vertex v and every
// pair of orderings of the induced subgraph ending at v, evaluates the model
// on both serialized sequences. Returns the maximum squared output difference
// (0 for a perfectly totally structure invariant model). Oracle-only; throws
// above the bound.
double structure_invariance_gap(const RecurrentModel& model, const Graph& g,
                                const Vocabulary& vocab,
                                int oracle_max_nodes = kDefaultOracleMaxNodes,
                                OlrTarget target = OlrTarget::output);

}  // namespace graphseq

#endif  // GRAPHSEQ_INVARIANCE_HPP
