#include "graphseq/invariance.hpp"

#include <algorithm>
#include <map>

#include "graphseq/codec.hpp"
#include "graphseq/error.hpp"

namespace graphseq {

namespace {

// Model output on one serialized ordering, reduced to the representation the
// gap compares: the task head under OlrTarget::output, the final hidden state
// under OlrTarget::hidden.
std::vector<double> model_signature(const RecurrentModel& m, const Graph& g,
                                    const Ordering& ord, const Vocabulary& vocab,
                                    OlrTarget target) {
    auto ids = tokenize(encode(g, ord), vocab);
    ForwardTrace tr = forward(m, ids);
    if (target == OlrTarget::hidden) {
        const double* h = tr.h_at(tr.steps);
        return std::vector<double>(h, h + m.hidden);
    }
    if (m.task == TaskKind::tree_lm) return lm_logits_at(m, tr, tr.steps - 1);
    return {regression_output(m, tr)};
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

double structure_invariance_gap(const RecurrentModel& model, const Graph& g,
                                const Vocabulary& vocab, int oracle_max_nodes,
                                OlrTarget target) {
    if (!is_connected(g))
        throw ValidationError("structure_invariance_gap: graph must be connected");
    double gap = 0.0;
    for (std::uint64_t mask : enumerate_prefix_supports(g, oracle_max_nodes)) {
        std::vector<int> nodes;
        for (int v = 0; v < g.node_count; ++v)
            if (mask >> v & 1) nodes.push_back(v);
        InducedSubgraph sub = induced_subgraph(g, nodes);
        // group orderings of the induced subgraph by end vertex
        std::map<int, std::vector<std::vector<double>>> by_end;
        for (const auto& seq : enumerate_orderings(sub.graph, oracle_max_nodes)) {
            auto ord = check_ordering(sub.graph, seq);
            by_end[seq.back()].push_back(
                model_signature(model, sub.graph, *ord, vocab, target));
        }
        for (const auto& [end, sigs] : by_end)
            for (std::size_t i = 0; i < sigs.size(); ++i)
                for (std::size_t j = i + 1; j < sigs.size(); ++j)
                    gap = std::max(gap, squared_distance(sigs[i], sigs[j]));
    }
    return gap;
}

}  // namespace graphseq
