#include "graphseq/dfs.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <sstream>

#include "graphseq/error.hpp"
#include "graphseq/rng.hpp"

namespace graphseq {

namespace {

void check_oracle_bound(const Graph& g, int bound, const char* op) {
    if (g.node_count > bound) {
        std::ostringstream msg;
        msg << op << ": graph has " << g.node_count
            << " nodes, exceeding the oracle bound " << bound;
        throw ValidationError(msg.str());
    }
}

bool is_simple_cycle(const Graph& g) {
    if (g.node_count < 3 || !is_connected(g)) return false;
    for (int v = 0; v < g.node_count; ++v)
        if (g.degree(v) != 2) return false;
    return true;
}

// One stochastic DFS run over a connected graph. While step < forced.size()
// and step != diverge_step the next node is forced[step]; at diverge_step the
// draw excludes forced[step]; otherwise uniform over the top's unvisited
// neighbors. first_choice (when non-null) receives the first step index that
// had >= 2 candidates, or -1.
Ordering stochastic_dfs(const Graph& g, int root, Rng& rng,
                        const std::vector<int>& forced = {}, int diverge_step = -1,
                        int* first_choice = nullptr) {
    const int n = g.node_count;
    Ordering ord;
    ord.parent_of.assign(n, -1);
    ord.visit_sequence.reserve(n);
    std::vector<char> visited(n, 0);
    std::vector<int> unvisited_deg(n), stack;
    for (int v = 0; v < n; ++v) unvisited_deg[v] = g.degree(v);
    if (first_choice) *first_choice = -1;
    auto visit = [&](int v) {
        visited[v] = 1;
        for (int u : g.adjacency[v]) --unvisited_deg[u];
        stack.push_back(v);
        ord.visit_sequence.push_back(v);
    };
    visit(root);
    std::vector<int> cand;
    for (int step = 1; step < n; ++step) {
        while (unvisited_deg[stack.back()] == 0) {
            stack.pop_back();
            assert(!stack.empty());
        }
        int top = stack.back();
        cand.clear();
        for (int u : g.adjacency[top])
            if (!visited[u]) cand.push_back(u);
        if (first_choice && *first_choice == -1 && cand.size() >= 2)
            *first_choice = step;
        int v;
        if (step == diverge_step) {
            std::vector<int> alt;
            for (int u : cand)
                if (u != forced[step]) alt.push_back(u);
            assert(!alt.empty());
            v = alt[rng.uniform_index(alt.size())];
        } else if (step < static_cast<int>(forced.size()) &&
                   (diverge_step < 0 || step < diverge_step)) {
            // replay the forced prefix; past a divergence the run is free
            v = forced[step];
        } else {
            v = cand[rng.uniform_index(cand.size())];
        }
        ord.parent_of[v] = top;
        visit(v);
    }
    return ord;
}

std::vector<int> to_original(const std::vector<int>& local_seq,
                             const std::vector<int>& original) {
    std::vector<int> out;
    out.reserve(local_seq.size());
    for (int v : local_seq) out.push_back(original[v]);
    return out;
}

Ordering checked(const Graph& g, const std::vector<int>& seq, const char* op) {
    auto ord = check_ordering(g, seq);
    if (!ord) throw RuntimeFailure(std::string(op) + ": constructed sequence failed validation");
    return *ord;
}

}  // namespace

std::optional<Ordering> check_ordering(const Graph& g, const std::vector<int>& seq) {
    const int n = g.node_count;
    if (n == 0 || static_cast<int>(seq.size()) != n) return std::nullopt;
    std::vector<char> visited(n, 0);
    for (int v : seq) {
        if (v < 0 || v >= n || visited[v]) return std::nullopt;
        visited[v] = 1;
    }
    std::fill(visited.begin(), visited.end(), 0);
    std::vector<int> unvisited_deg(n), stack;
    for (int v = 0; v < n; ++v) unvisited_deg[v] = g.degree(v);
    Ordering ord;
    ord.visit_sequence = seq;
    ord.parent_of.assign(n, -1);
    auto visit = [&](int v) {
        visited[v] = 1;
        for (int u : g.adjacency[v]) --unvisited_deg[u];
        stack.push_back(v);
    };
    visit(seq[0]);
    for (int i = 1; i < n; ++i) {
        while (!stack.empty() && unvisited_deg[stack.back()] == 0) stack.pop_back();
        if (stack.empty()) return std::nullopt;
        int top = stack.back();
        int v = seq[i];
        if (!g.has_edge(top, v)) return std::nullopt;
        ord.parent_of[v] = top;
        visit(v);
    }
    return ord;
}

bool is_valid_ordering(const Graph& g, const std::vector<int>& seq) {
    return check_ordering(g, seq).has_value();
}

Ordering sample_ordering(const Graph& g, std::optional<int> root, std::uint64_t seed) {
    if (g.node_count == 0) throw ValidationError("sample_ordering: empty graph");
    if (root && (*root < 0 || *root >= g.node_count))
        throw ValidationError("sample_ordering: root out of range");
    if (!is_connected(g)) throw ValidationError("sample_ordering: graph must be connected");
    Rng rng(seed);
    int r = root ? *root : rng.uniform_index(static_cast<std::size_t>(g.node_count));
    return stochastic_dfs(g, r, rng);
}

namespace {

enum class Walk { proceed, prune, abort };

// Backtracking enumeration of every DFS run; on_prefix is called with the
// visit sequence after every visit (so once per reachable prefix) and decides
// whether to descend, skip the subtree, or stop the whole search. Forced pops
// are undone on the way back up.
template <typename OnPrefix>
void enumerate_runs(const Graph& g, OnPrefix&& on_prefix) {
    const int n = g.node_count;
    if (n == 0) return;
    std::vector<char> visited(n, 0);
    std::vector<int> unvisited_deg(n), stack, seq;
    for (int v = 0; v < n; ++v) unvisited_deg[v] = g.degree(v);

    auto visit = [&](int v) {
        visited[v] = 1;
        for (int u : g.adjacency[v]) --unvisited_deg[u];
        stack.push_back(v);
        seq.push_back(v);
    };
    auto unvisit = [&](int v) {
        seq.pop_back();
        stack.pop_back();
        for (int u : g.adjacency[v]) ++unvisited_deg[u];
        visited[v] = 0;
    };

    auto rec = [&](auto&& self) -> bool {
        switch (on_prefix(static_cast<const std::vector<int>&>(seq))) {
            case Walk::abort: return false;
            case Walk::prune: return true;
            case Walk::proceed: break;
        }
        if (static_cast<int>(seq.size()) == n) return true;
        std::vector<int> popped;
        while (!stack.empty() && unvisited_deg[stack.back()] == 0) {
            popped.push_back(stack.back());
            stack.pop_back();
        }
        bool keep_going = true;
        if (!stack.empty()) {
            int top = stack.back();
            for (int v : g.adjacency[top]) {
                if (visited[v]) continue;
                visit(v);
                keep_going = self(self);
                unvisit(v);
                if (!keep_going) break;
            }
        }
        for (auto it = popped.rbegin(); it != popped.rend(); ++it) stack.push_back(*it);
        return keep_going;
    };

    bool keep_going = true;
    for (int r = 0; r < n && keep_going; ++r) {
        visit(r);
        keep_going = rec(rec);
        unvisit(r);
    }
}

}  // namespace

std::set<std::vector<int>> enumerate_orderings(const Graph& g, int oracle_max_nodes) {
    check_oracle_bound(g, oracle_max_nodes, "enumerate_orderings");
    std::set<std::vector<int>> out;
    enumerate_runs(g, [&](const std::vector<int>& seq) {
        if (static_cast<int>(seq.size()) == g.node_count) out.insert(seq);
        return Walk::proceed;
    });
    return out;
}

std::set<std::vector<int>> enumerate_orderings_ending_at(const Graph& g, int v,
                                                         int oracle_max_nodes) {
    check_oracle_bound(g, oracle_max_nodes, "enumerate_orderings_ending_at");
    if (v < 0 || v >= g.node_count)
        throw ValidationError("enumerate_orderings_ending_at: node out of range");
    std::set<std::vector<int>> out;
    enumerate_runs(g, [&](const std::vector<int>& seq) {
        if (static_cast<int>(seq.size()) == g.node_count && seq.back() == v)
            out.insert(seq);
        return Walk::proceed;
    });
    return out;
}

std::set<std::uint64_t> enumerate_prefix_supports(const Graph& g, int oracle_max_nodes) {
    check_oracle_bound(g, std::min(oracle_max_nodes, 63), "enumerate_prefix_supports");
    std::set<std::uint64_t> masks;
    enumerate_runs(g, [&](const std::vector<int>& seq) {
        std::uint64_t mask = 0;
        for (int v : seq) mask |= std::uint64_t{1} << v;
        masks.insert(mask);
        return Walk::proceed;
    });
    return masks;
}

InducedSubgraphSample sample_dfs_induced_subgraph(const Graph& g, std::uint64_t seed) {
    if (g.node_count == 0)
        throw ValidationError("sample_dfs_induced_subgraph: empty graph");
    if (!is_connected(g))
        throw ValidationError("sample_dfs_induced_subgraph: graph must be connected");
    Rng rng(seed);
    int root = rng.uniform_index(static_cast<std::size_t>(g.node_count));
    Ordering full = stochastic_dfs(g, root, rng);
    int k = 1 + rng.uniform_index(static_cast<std::size_t>(g.node_count));
    std::vector<int> prefix(full.visit_sequence.begin(), full.visit_sequence.begin() + k);
    InducedSubgraph sub = induced_subgraph(g, prefix);
    std::vector<int> local_of(g.node_count, -1);
    for (std::size_t i = 0; i < sub.original.size(); ++i) local_of[sub.original[i]] = static_cast<int>(i);
    std::vector<int> local_seq;
    local_seq.reserve(prefix.size());
    for (int v : full.visit_sequence)
        if (static_cast<int>(local_seq.size()) < k) local_seq.push_back(local_of[v]);
    InducedSubgraphSample out;
    out.ordering = checked(sub.graph, local_seq, "sample_dfs_induced_subgraph");
    out.subgraph = std::move(sub.graph);
    out.original_index = std::move(sub.original);
    return out;
}

bool is_dfs_induced(const Graph& g, const std::vector<int>& nodes, int oracle_max_nodes) {
    check_oracle_bound(g, std::min(oracle_max_nodes, 63), "is_dfs_induced");
    if (nodes.empty()) throw ValidationError("is_dfs_induced: empty node set");
    std::uint64_t target = 0;
    for (int v : nodes) {
        if (v < 0 || v >= g.node_count)
            throw ValidationError("is_dfs_induced: node out of range");
        target |= std::uint64_t{1} << v;
    }
    const std::size_t k = static_cast<std::size_t>(std::popcount(target));
    if (k != nodes.size()) throw ValidationError("is_dfs_induced: duplicate node");

    bool found = false;
    enumerate_runs(g, [&](const std::vector<int>& seq) {
        // prune runs that leave the target set before covering it
        if ((target >> seq.back() & 1) == 0) return Walk::prune;
        if (seq.size() < k) return Walk::proceed;
        std::uint64_t mask = 0;
        for (int v : seq) mask |= std::uint64_t{1} << v;
        if (mask == target) {
            InducedSubgraph sub = induced_subgraph(g, seq);
            std::vector<int> local_of(g.node_count, -1);
            for (std::size_t i = 0; i < sub.original.size(); ++i)
                local_of[sub.original[i]] = static_cast<int>(i);
            std::vector<int> local_seq;
            for (int v : seq) local_seq.push_back(local_of[v]);
            if (is_valid_ordering(sub.graph, local_seq)) {
                found = true;
                return Walk::abort;
            }
        }
        return Walk::prune;  // extensions share this k-prefix
    });
    return found;
}

namespace {

// Component containing `start` after deleting one edge.
std::vector<int> component_without_edge(const Graph& g, Edge removed, int start) {
    std::vector<char> seen(g.node_count, 0);
    std::vector<int> stack{start}, comp;
    seen[start] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        comp.push_back(u);
        for (int v : g.adjacency[u]) {
            if (seen[v] || canonical_edge(u, v) == removed) continue;
            seen[v] = 1;
            stack.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    return comp;
}

// Oriented bridge cut: side_a contains u.
CutResult oriented_bridge_cut(const Graph& g, int u, int v) {
    CutResult cut;
    cut.crossing_edges = {canonical_edge(u, v)};
    cut.side_a = component_without_edge(g, cut.crossing_edges[0], u);
    cut.side_b = component_without_edge(g, cut.crossing_edges[0], v);
    return cut;
}

bool side_contains(const std::vector<int>& side, int v) {
    return std::binary_search(side.begin(), side.end(), v);
}

std::string edge_str(const Edge& e) {
    return "(" + std::to_string(e.first) + "," + std::to_string(e.second) + ")";
}

}  // namespace

TrajectoryPair common_end_pair_bridge(const Graph& g, const CutResult& cut,
                                      std::uint64_t seed) {
    if (cut.crossing_edges.size() != 1)
        throw ValidationError("common_end_pair_bridge: cut must have exactly one crossing edge");
    const Edge e = cut.crossing_edges[0];
    const int u = side_contains(cut.side_a, e.first) ? e.first : e.second;
    const int v = e.first == u ? e.second : e.first;
    if (!side_contains(cut.side_a, u) || !side_contains(cut.side_b, v))
        throw ValidationError("common_end_pair_bridge: cut sides do not match the crossing edge");
    if (cut.side_b.size() < 2)
        throw ValidationError("degenerate suffix side");

    InducedSubgraph g1 = induced_subgraph(g, cut.side_a);
    InducedSubgraph g2 = induced_subgraph(g, cut.side_b);
    const int u_local = static_cast<int>(
        std::lower_bound(g1.original.begin(), g1.original.end(), u) - g1.original.begin());
    const int v_local = static_cast<int>(
        std::lower_bound(g2.original.begin(), g2.original.end(), v) - g2.original.begin());

    Rng rng(seed);
    int first_choice = -1;
    Ordering a_local = stochastic_dfs(g1.graph, u_local, rng, {}, -1, &first_choice);
    if (first_choice == -1) throw ValidationError("no branching on cut side");
    Ordering b_local = stochastic_dfs(g1.graph, u_local, rng, a_local.visit_sequence, first_choice);
    Ordering suffix_local = stochastic_dfs(g2.graph, v_local, rng);

    auto glue = [&](const Ordering& side_ord) {
        std::vector<int> seq{v};
        for (int x : to_original(side_ord.visit_sequence, g1.original)) seq.push_back(x);
        auto suffix = to_original(suffix_local.visit_sequence, g2.original);
        seq.insert(seq.end(), suffix.begin() + 1, suffix.end());
        return checked(g, seq, "common_end_pair_bridge");
    };

    TrajectoryPair pair;
    pair.first = glue(a_local);
    pair.second = glue(b_local);
    pair.common_end = pair.first.last();
    assert(pair.first.visit_sequence != pair.second.visit_sequence);
    assert(pair.second.last() == pair.common_end);
    return pair;
}

namespace {

struct TwoCutOrientation {
    CutResult cut;
    int enter_vary;   // u: root of the varying side
    int leave_vary;   // w: required last vertex of the varying side
    int enter_fixed;  // z: root of the fixed side
    bool vary_has_cycle;
    std::vector<int> vary_side, fixed_side;
};

std::vector<TwoCutOrientation> two_cut_orientations(const Graph& g,
                                                    const std::vector<CutResult>& cuts) {
    std::vector<TwoCutOrientation> out;
    for (const auto& cut : cuts) {
        if (cut.crossing_edges.size() != 2) continue;
        for (int flip = 0; flip < 2; ++flip) {
            const auto& vary = flip ? cut.side_b : cut.side_a;
            const auto& fixed = flip ? cut.side_a : cut.side_b;
            if (vary.size() < 2) continue;
            // either crossing edge can be the entry into the varying side
            for (int edge_order = 0; edge_order < 2; ++edge_order) {
                const Edge enter_edge = cut.crossing_edges[edge_order];
                const Edge leave_edge = cut.crossing_edges[1 - edge_order];
                int u = side_contains(vary, enter_edge.first) ? enter_edge.first
                                                              : enter_edge.second;
                int w = side_contains(vary, leave_edge.first) ? leave_edge.first
                                                              : leave_edge.second;
                int z = leave_edge.first == w ? leave_edge.second : leave_edge.first;
                if (u == w) continue;
                TwoCutOrientation o;
                o.cut = cut;
                o.enter_vary = u;
                o.leave_vary = w;
                o.enter_fixed = z;
                o.vary_side = vary;
                o.fixed_side = fixed;
                InducedSubgraph sub = induced_subgraph(g, vary);
                o.vary_has_cycle = sub.graph.edge_count() >= sub.graph.node_count;
                out.push_back(std::move(o));
            }
        }
    }
    return out;
}

// Rejection-samples distinct DFS orderings of `side` rooted at `from` and
// ending at `to`, up to `want` of them within `budget` attempts.
std::vector<Ordering> end_constrained_orderings(const Graph& side, int from, int to,
                                                int want, int budget, Rng& rng) {
    std::set<std::vector<int>> seen;
    std::vector<Ordering> out;
    for (int attempt = 0; attempt < budget && static_cast<int>(out.size()) < want; ++attempt) {
        Ordering ord = stochastic_dfs(side, from, rng);
        if (ord.last() != to) continue;
        if (seen.insert(ord.visit_sequence).second) out.push_back(std::move(ord));
    }
    return out;
}

}  // namespace

TrajectoryPair common_end_pair_two_connected(const Graph& g, std::uint64_t seed,
                                             const PairOptions& opts) {
    if (!is_connected(g))
        throw ValidationError("common_end_pair_two_connected: graph must be connected");
    if (!find_bridges(g).empty())
        throw ValidationError("common_end_pair_two_connected: graph has a bridge");
    if (is_simple_cycle(g)) throw ValidationError("cycle special case");

    const auto cuts = enumerate_min_cuts(g, 2);
    auto orientations = two_cut_orientations(g, cuts);
    if (orientations.empty())
        throw ValidationError("no end-constrained traversal found (graph has no usable 2-cut)");

    Rng rng(seed);
    rng.shuffle(orientations);
    // the appendix argument guarantees traversals on a side containing a cycle
    std::stable_partition(orientations.begin(), orientations.end(),
                          [](const TwoCutOrientation& o) { return o.vary_has_cycle; });

    std::string last_cut;
    for (const auto& o : orientations) {
        last_cut = edge_str(o.cut.crossing_edges[0]) + "," + edge_str(o.cut.crossing_edges[1]);
        InducedSubgraph vary = induced_subgraph(g, o.vary_side);
        InducedSubgraph fixed = induced_subgraph(g, o.fixed_side);
        auto local = [](const InducedSubgraph& s, int orig) {
            return static_cast<int>(std::lower_bound(s.original.begin(), s.original.end(), orig) -
                                    s.original.begin());
        };
        auto varying = end_constrained_orderings(vary.graph, local(vary, o.enter_vary),
                                                 local(vary, o.leave_vary), 2,
                                                 opts.rejection_budget, rng);
        if (varying.size() < 2) continue;
        Ordering suffix = stochastic_dfs(fixed.graph, local(fixed, o.enter_fixed), rng);
        auto glue = [&](const Ordering& side_ord) {
            std::vector<int> seq = to_original(side_ord.visit_sequence, vary.original);
            auto tail = to_original(suffix.visit_sequence, fixed.original);
            seq.insert(seq.end(), tail.begin(), tail.end());
            return checked(g, seq, "common_end_pair_two_connected");
        };
        TrajectoryPair pair;
        pair.first = glue(varying[0]);
        pair.second = glue(varying[1]);
        pair.common_end = pair.first.last();
        return pair;
    }
    throw ValidationError("no end-constrained traversal found (last cut " + last_cut + ")");
}

namespace {

// Both orderings of a simple cycle rooted at the two neighbors of v,
// traversing away from v; each ends at v.
std::vector<Ordering> cycle_orderings_ending_at(const Graph& g, int v) {
    std::vector<Ordering> out;
    for (int root : g.adjacency[v]) {
        std::vector<int> seq{root};
        int prev = v, cur = root;
        while (static_cast<int>(seq.size()) < g.node_count - 1) {
            int nxt = g.adjacency[cur][0] == prev ? g.adjacency[cur][1] : g.adjacency[cur][0];
            seq.push_back(nxt);
            prev = cur;
            cur = nxt;
        }
        seq.push_back(v);
        out.push_back(checked(g, seq, "cycle pair"));
    }
    return out;
}

}  // namespace

TrajectoryPair common_end_pair_any(const Graph& g, std::uint64_t seed,
                                   const PairOptions& opts) {
    if (!is_connected(g))
        throw ValidationError("common_end_pair_any: graph must be connected");
    if (g.node_count < 3)
        throw ValidationError("common_end_pair_any: need at least 3 nodes");

    Rng rng(seed);
    const auto bridges = find_bridges(g);
    if (!bridges.empty()) {
        std::vector<std::pair<Edge, bool>> oriented;
        for (const auto& e : bridges) {
            oriented.push_back({e, false});
            oriented.push_back({e, true});
        }
        rng.shuffle(oriented);
        for (const auto& [e, flip] : oriented) {
            int u = flip ? e.second : e.first;
            int v = flip ? e.first : e.second;
            try {
                return common_end_pair_bridge(g, oriented_bridge_cut(g, u, v), rng.next());
            } catch (const ValidationError&) {
                // ineligible orientation; keep trying
            }
        }
        throw ValidationError("graph admits no heuristic pair");
    }
    if (is_simple_cycle(g)) {
        int v = rng.uniform_index(static_cast<std::size_t>(g.node_count));
        auto ords = cycle_orderings_ending_at(g, v);
        TrajectoryPair pair;
        pair.first = std::move(ords[0]);
        pair.second = std::move(ords[1]);
        pair.common_end = v;
        return pair;
    }
    return common_end_pair_two_connected(g, rng.next(), opts);
}

namespace {

// A cut-based generation plan for trajectory_set. Bridge plans come in two
// shapes sharing the varying u-side rooted at u:
//   eq8:    v, <u-side ordering>, <remainder of the v-side ordering from v>
//   mirror: <u-side ordering>, <v-side ordering from v>
// The mirror shape covers suffix sides of size 1, where eq8 degenerates.
struct Plan {
    enum Kind { bridge_eq8, bridge_mirror, two_cut } kind;
    int u = -1, v = -1;                // bridge orientation
    std::vector<int> side_u, side_v;   // bridge sides
    TwoCutOrientation two;             // two_cut payload
};

std::vector<Ordering> run_plan(const Graph& g, const Plan& plan, int count, int budget,
                               Rng& rng) {
    std::vector<Ordering> out;
    if (plan.kind == Plan::two_cut) {
        InducedSubgraph vary = induced_subgraph(g, plan.two.vary_side);
        InducedSubgraph fixed = induced_subgraph(g, plan.two.fixed_side);
        auto local = [](const InducedSubgraph& s, int orig) {
            return static_cast<int>(std::lower_bound(s.original.begin(), s.original.end(), orig) -
                                    s.original.begin());
        };
        auto varying = end_constrained_orderings(vary.graph, local(vary, plan.two.enter_vary),
                                                 local(vary, plan.two.leave_vary), count,
                                                 budget, rng);
        Ordering suffix = stochastic_dfs(fixed.graph, local(fixed, plan.two.enter_fixed), rng);
        for (const auto& side_ord : varying) {
            std::vector<int> seq = to_original(side_ord.visit_sequence, vary.original);
            auto tail = to_original(suffix.visit_sequence, fixed.original);
            seq.insert(seq.end(), tail.begin(), tail.end());
            out.push_back(checked(g, seq, "trajectory_set"));
        }
        return out;
    }

    InducedSubgraph g1 = induced_subgraph(g, plan.side_u);
    InducedSubgraph g2 = induced_subgraph(g, plan.side_v);
    const int u_local = static_cast<int>(
        std::lower_bound(g1.original.begin(), g1.original.end(), plan.u) - g1.original.begin());
    const int v_local = static_cast<int>(
        std::lower_bound(g2.original.begin(), g2.original.end(), plan.v) - g2.original.begin());
    Ordering suffix = stochastic_dfs(g2.graph, v_local, rng);
    std::set<std::vector<int>> seen;
    for (int attempt = 0; attempt < budget && static_cast<int>(out.size()) < count; ++attempt) {
        Ordering side_ord = stochastic_dfs(g1.graph, u_local, rng);
        if (!seen.insert(side_ord.visit_sequence).second) continue;
        std::vector<int> seq;
        auto tail = to_original(suffix.visit_sequence, g2.original);
        if (plan.kind == Plan::bridge_eq8) {
            seq.push_back(plan.v);
            for (int x : to_original(side_ord.visit_sequence, g1.original)) seq.push_back(x);
            seq.insert(seq.end(), tail.begin() + 1, tail.end());
        } else {
            seq = to_original(side_ord.visit_sequence, g1.original);
            seq.insert(seq.end(), tail.begin(), tail.end());
        }
        out.push_back(checked(g, seq, "trajectory_set"));
    }
    return out;
}

}  // namespace

std::vector<Ordering> trajectory_set(const Graph& g, int count, std::uint64_t seed,
                                     const PairOptions& opts) {
    if (count < 1) throw ValidationError("trajectory_set: count must be >= 1");
    if (!is_connected(g)) throw ValidationError("trajectory_set: graph must be connected");
    if (g.node_count == 1) throw ValidationError("graph admits no heuristic pair");

    Rng rng(seed);
    std::vector<Plan> plans;
    const auto bridges = find_bridges(g);
    if (!bridges.empty()) {
        for (const auto& e : bridges) {
            for (int flip = 0; flip < 2; ++flip) {
                int u = flip ? e.second : e.first;
                int v = flip ? e.first : e.second;
                CutResult cut = oriented_bridge_cut(g, u, v);
                if (cut.side_a.size() < 2) continue;  // no branching possible on a singleton
                Plan base;
                base.u = u;
                base.v = v;
                base.side_u = cut.side_a;
                base.side_v = cut.side_b;
                if (cut.side_b.size() >= 2) {
                    base.kind = Plan::bridge_eq8;
                    plans.push_back(base);
                }
                base.kind = Plan::bridge_mirror;
                plans.push_back(base);
            }
        }
    } else {
        for (auto& o : two_cut_orientations(g, enumerate_min_cuts(g, 2))) {
            Plan p;
            p.kind = Plan::two_cut;
            p.two = std::move(o);
            plans.push_back(std::move(p));
        }
    }
    rng.shuffle(plans);

    const int need = std::min(count, 2);
    const int budget = std::max(opts.rejection_budget, 20 * count);
    for (const auto& plan : plans) {
        auto got = run_plan(g, plan, count, budget, rng);
        if (static_cast<int>(got.size()) < need) continue;
        return got;
    }
    if (is_simple_cycle(g)) {
        int v = rng.uniform_index(static_cast<std::size_t>(g.node_count));
        auto ords = cycle_orderings_ending_at(g, v);
        if (count == 1) ords.resize(1);
        return ords;
    }
    throw ValidationError("graph admits no heuristic pair");
}

}  // namespace graphseq
