#include "graphseq/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "graphseq/error.hpp"
#include "graphseq/rng.hpp"

namespace graphseq {

bool Graph::has_edge(int a, int b) const {
    const auto& nbrs = adjacency[a];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

int Graph::edge_count() const {
    int deg_sum = 0;
    for (const auto& nbrs : adjacency) deg_sum += static_cast<int>(nbrs.size());
    return deg_sum / 2;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    for (int u = 0; u < node_count; ++u)
        for (int v : adjacency[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

Graph make_graph(int node_count, const std::vector<Edge>& edges,
                 std::vector<std::string> node_labels) {
    if (node_count < 0) throw ValidationError("node_count must be non-negative");
    if (!node_labels.empty() && static_cast<int>(node_labels.size()) != node_count)
        throw ValidationError("node_labels size does not match node_count");
    Graph g;
    g.node_count = node_count;
    g.adjacency.assign(node_count, {});
    g.node_labels = std::move(node_labels);
    for (const auto& [a, b] : edges) {
        if (a < 0 || a >= node_count || b < 0 || b >= node_count)
            throw ValidationError("edge endpoint out of range");
        if (a == b) throw ValidationError("self-loop not allowed");
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
    }
    for (auto& nbrs : g.adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
        if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end())
            throw ValidationError("parallel edge not allowed");
    }
    return g;
}

namespace {

// Component of `start` with `skip` edges removed; marks `seen`.
void flood(const Graph& g, int start, std::vector<char>& seen,
           const std::vector<Edge>& skip = {}) {
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : g.adjacency[u]) {
            if (seen[v]) continue;
            if (!skip.empty() &&
                std::find(skip.begin(), skip.end(), canonical_edge(u, v)) != skip.end())
                continue;
            seen[v] = 1;
            stack.push_back(v);
        }
    }
}

bool connected_without(const Graph& g, const std::vector<Edge>& removed) {
    if (g.node_count <= 1) return true;
    std::vector<char> seen(g.node_count, 0);
    flood(g, 0, seen, removed);
    return std::count(seen.begin(), seen.end(), 1) == g.node_count;
}

void require_connected(const Graph& g, const char* op) {
    if (!is_connected(g))
        throw ValidationError(std::string(op) + ": graph must be connected");
}

}  // namespace

bool is_connected(const Graph& g) {
    if (g.node_count == 0) return true;
    std::vector<char> seen(g.node_count, 0);
    flood(g, 0, seen);
    return std::count(seen.begin(), seen.end(), 1) == g.node_count;
}

std::vector<Edge> find_bridges(const Graph& g) {
    require_connected(g, "find_bridges");
    const int n = g.node_count;
    std::vector<int> disc(n, -1), low(n, 0), parent(n, -1), it(n, 0);
    std::vector<Edge> bridges;
    int timer = 0;
    if (n == 0) return bridges;
    // iterative low-link DFS; parent edge skipped once (parallel edges are
    // excluded by construction, so one skip per child suffices)
    std::vector<char> parent_skipped(n, 0);
    std::vector<int> stack{0};
    disc[0] = low[0] = timer++;
    while (!stack.empty()) {
        int u = stack.back();
        if (it[u] < static_cast<int>(g.adjacency[u].size())) {
            int v = g.adjacency[u][it[u]++];
            if (v == parent[u] && !parent_skipped[u]) {
                parent_skipped[u] = 1;
                continue;
            }
            if (disc[v] == -1) {
                parent[v] = u;
                disc[v] = low[v] = timer++;
                stack.push_back(v);
            } else {
                low[u] = std::min(low[u], disc[v]);
            }
        } else {
            stack.pop_back();
            if (!stack.empty()) {
                int p = stack.back();
                low[p] = std::min(low[p], low[u]);
                if (low[u] > disc[p]) bridges.push_back(canonical_edge(p, u));
            }
        }
    }
    std::sort(bridges.begin(), bridges.end());
    return bridges;
}

EdgeConnectivity edge_connectivity_class(const Graph& g) {
    require_connected(g, "edge_connectivity_class");
    if (g.node_count < 2)
        throw ValidationError("edge_connectivity_class: need at least 2 nodes");
    if (!find_bridges(g).empty()) return EdgeConnectivity::one_edge_connected;
    const auto es = g.edges();
    for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = i + 1; j < es.size(); ++j)
            if (!connected_without(g, {es[i], es[j]}))
                return EdgeConnectivity::two_edge_connected;
    return EdgeConnectivity::higher;
}

const char* to_string(EdgeConnectivity c) {
    switch (c) {
        case EdgeConnectivity::one_edge_connected: return "one_edge_connected";
        case EdgeConnectivity::two_edge_connected: return "two_edge_connected";
        default: return "higher";
    }
}

namespace {

CutResult make_cut(const Graph& g, std::vector<Edge> crossing) {
    std::sort(crossing.begin(), crossing.end());
    std::vector<char> seen(g.node_count, 0);
    flood(g, crossing.front().first, seen, crossing);
    CutResult cut;
    cut.crossing_edges = std::move(crossing);
    for (int v = 0; v < g.node_count; ++v)
        (seen[v] ? cut.side_a : cut.side_b).push_back(v);
    return cut;
}

}  // namespace

std::vector<CutResult> enumerate_min_cuts(const Graph& g, int max_size) {
    require_connected(g, "enumerate_min_cuts");
    if (max_size < 1 || max_size > 2)
        throw ValidationError("enumerate_min_cuts: max_size must be 1 or 2");
    std::vector<CutResult> cuts;
    const auto bridges = find_bridges(g);
    if (!bridges.empty()) {
        // minimal crossing size is 1
        for (const auto& e : bridges) cuts.push_back(make_cut(g, {e}));
        return cuts;
    }
    if (max_size < 2) return cuts;
    const auto es = g.edges();
    for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = i + 1; j < es.size(); ++j)
            if (!connected_without(g, {es[i], es[j]}))
                cuts.push_back(make_cut(g, {es[i], es[j]}));
    return cuts;
}

InducedSubgraph induced_subgraph(const Graph& g, std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw ValidationError("induced_subgraph: duplicate node");
    std::vector<int> local(g.node_count, -1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        int v = nodes[i];
        if (v < 0 || v >= g.node_count)
            throw ValidationError("induced_subgraph: node out of range");
        local[v] = static_cast<int>(i);
    }
    std::vector<Edge> edges;
    for (int v : nodes)
        for (int u : g.adjacency[v])
            if (u > v && local[u] != -1)
                edges.emplace_back(local[v], local[u]);
    std::vector<std::string> labels;
    if (g.labeled())
        for (int v : nodes) labels.push_back(g.node_labels[v]);
    InducedSubgraph sub;
    sub.graph = make_graph(static_cast<int>(nodes.size()), edges, std::move(labels));
    sub.original = std::move(nodes);
    return sub;
}

long long wiener_index(const Graph& g) {
    require_connected(g, "wiener_index");
    long long total = 0;
    std::vector<int> dist(g.node_count);
    for (int s = 0; s < g.node_count; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<int> q;
        dist[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : g.adjacency[u])
                if (dist[v] == -1) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
        }
        for (int v = s + 1; v < g.node_count; ++v) total += dist[v];
    }
    return total;
}

Graph random_tree(int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("random_tree: n must be >= 1");
    if (n == 1) return make_graph(1, {});
    if (n == 2) return make_graph(2, {{0, 1}});
    Rng rng(seed);
    // Pruefer decode of a uniform parent code; yields a uniform labeled tree.
    std::vector<int> code(n - 2);
    for (int& c : code) c = rng.uniform_index(static_cast<std::size_t>(n));
    std::vector<int> degree(n, 1);
    for (int c : code) ++degree[c];
    std::vector<Edge> edges;
    // smallest-leaf first decoding
    int ptr = 0;
    while (degree[ptr] != 1) ++ptr;
    int leaf = ptr;
    for (int c : code) {
        edges.push_back(canonical_edge(leaf, c));
        if (--degree[c] == 1 && c < ptr) {
            leaf = c;
        } else {
            while (degree[++ptr] != 1) {}
            leaf = ptr;
        }
    }
    edges.push_back(canonical_edge(leaf, n - 1));
    return make_graph(n, edges);
}

Graph random_connected_graph(int n, int extra_edges, std::uint64_t seed) {
    if (n < 1) throw ValidationError("random_connected_graph: n must be >= 1");
    const long long max_extra =
        static_cast<long long>(n) * (n - 1) / 2 - (n - 1);
    if (extra_edges < 0 || extra_edges > max_extra)
        throw ValidationError("random_connected_graph: infeasible extra_edges");
    Graph tree = random_tree(n, derive_seed(seed, stream_tag("tree")));
    std::vector<Edge> edges = tree.edges();
    std::vector<Edge> candidates;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!tree.has_edge(a, b)) candidates.emplace_back(a, b);
    Rng rng(derive_seed(seed, stream_tag("extra")));
    rng.shuffle(candidates);
    edges.insert(edges.end(), candidates.begin(), candidates.begin() + extra_edges);
    return make_graph(n, edges, tree.node_labels);
}

}  // namespace graphseq
