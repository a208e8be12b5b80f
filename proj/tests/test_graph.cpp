#include <doctest.h>

#include <sstream>

#include "graphseq/error.hpp"
#include "graphseq/graph.hpp"
#include "graphseq/graph_io.hpp"
#include "graphseq/rng.hpp"
#include "oracles.hpp"

using namespace graphseq;

namespace {

Graph path_graph(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return make_graph(n, edges);
}

Graph cycle_graph(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.push_back(canonical_edge(i, (i + 1) % n));
    return make_graph(n, edges);
}

Graph complete_graph(int n) {
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edges.emplace_back(a, b);
    return make_graph(n, edges);
}

}  // namespace

TEST_CASE("make_graph validates invariants") {
    CHECK_THROWS_AS(make_graph(2, {{0, 0}}), ValidationError);
    CHECK_THROWS_AS(make_graph(2, {{0, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(make_graph(2, {{0, 2}}), ValidationError);
    Graph g = make_graph(3, {{2, 0}, {0, 1}});
    CHECK(g.adjacency[0] == std::vector<int>{1, 2});
    CHECK(g.has_edge(2, 0));
    CHECK(g.edge_count() == 2);
}

TEST_CASE("is_connected") {
    CHECK(is_connected(make_graph(2, {{0, 1}})));
    CHECK_FALSE(is_connected(make_graph(2, {})));
    CHECK(is_connected(cycle_graph(4)));
    CHECK(is_connected(make_graph(0, {})));  // vacuously
    CHECK(is_connected(make_graph(1, {})));
}

TEST_CASE("find_bridges on fixed graphs") {
    CHECK(find_bridges(path_graph(3)) == std::vector<Edge>{{0, 1}, {1, 2}});
    CHECK(find_bridges(cycle_graph(3)).empty());
    // 3-cycle with pendant 3 attached to 0
    Graph g = make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}});
    CHECK(find_bridges(g) == std::vector<Edge>{{0, 3}});
    CHECK_THROWS_AS(find_bridges(make_graph(3, {{0, 1}})), ValidationError);
}

TEST_CASE("find_bridges agrees with the delete-and-test oracle") {
    Rng rng(stream_tag("bridges"));
    int checked = 0;
    for (int trial = 0; trial < 220; ++trial) {
        int n = 2 + rng.uniform_index(9);  // up to 10 nodes
        int max_extra = n * (n - 1) / 2 - (n - 1);
        int extra = rng.uniform_index(max_extra + 1);
        Graph g = random_connected_graph(n, extra, rng.next());
        CHECK(find_bridges(g) == oracles::brute_force_bridges(g));
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("edge_connectivity_class") {
    CHECK(edge_connectivity_class(path_graph(3)) == EdgeConnectivity::one_edge_connected);
    CHECK(edge_connectivity_class(cycle_graph(4)) == EdgeConnectivity::two_edge_connected);
    CHECK(edge_connectivity_class(complete_graph(4)) == EdgeConnectivity::higher);
    CHECK_THROWS_AS(edge_connectivity_class(make_graph(1, {})), ValidationError);
    CHECK_THROWS_AS(edge_connectivity_class(make_graph(2, {})), ValidationError);
}

TEST_CASE("enumerate_min_cuts on a path") {
    auto cuts = enumerate_min_cuts(path_graph(3), 1);
    REQUIRE(cuts.size() == 2);
    CHECK(cuts[0].crossing_edges == std::vector<Edge>{{0, 1}});
    CHECK(cuts[0].side_a == std::vector<int>{0});
    CHECK(cuts[0].side_b == std::vector<int>{1, 2});
    CHECK(cuts[1].crossing_edges == std::vector<Edge>{{1, 2}});
    CHECK(cuts[1].side_a == std::vector<int>{0, 1});
    CHECK(cuts[1].side_b == std::vector<int>{2});
}

TEST_CASE("enumerate_min_cuts on a 4-cycle") {
    CHECK(enumerate_min_cuts(cycle_graph(4), 1).empty());
    auto cuts = enumerate_min_cuts(cycle_graph(4), 2);
    // C(4,2) = 6 edge pairs, every pair disconnects a cycle
    CHECK(cuts.size() == 6);
    bool found = false;
    for (const auto& cut : cuts) {
        if (cut.crossing_edges == std::vector<Edge>{{0, 1}, {2, 3}}) {
            found = true;
            CHECK(cut.side_a == std::vector<int>{0, 3});
            CHECK(cut.side_b == std::vector<int>{1, 2});
        }
    }
    CHECK(found);
}

TEST_CASE("every CutResult splits the graph into its two sides") {
    Rng rng(stream_tag("cuts"));
    for (int trial = 0; trial < 80; ++trial) {
        int n = 3 + rng.uniform_index(7);
        int max_extra = n * (n - 1) / 2 - (n - 1);
        Graph g = random_connected_graph(n, rng.uniform_index(max_extra + 1), rng.next());
        for (const auto& cut : enumerate_min_cuts(g, 2)) {
            CHECK_FALSE(oracles::connected_after_removing(g, cut.crossing_edges));
            CHECK(cut.side_a.size() + cut.side_b.size() == static_cast<std::size_t>(n));
            // each side is internally connected
            auto sub_a = induced_subgraph(g, cut.side_a);
            auto sub_b = induced_subgraph(g, cut.side_b);
            CHECK(is_connected(sub_a.graph));
            CHECK(is_connected(sub_b.graph));
            // removing the crossing edges leaves exactly the two sides: no
            // edge other than the crossing ones runs between the sides
            int crossing = 0;
            for (const auto& [a, b] : g.edges()) {
                bool a_in = std::binary_search(cut.side_a.begin(), cut.side_a.end(), a);
                bool b_in = std::binary_search(cut.side_a.begin(), cut.side_a.end(), b);
                if (a_in != b_in) ++crossing;
            }
            CHECK(crossing == static_cast<int>(cut.crossing_edges.size()));
        }
    }
}

TEST_CASE("wiener_index fixed examples") {
    CHECK(wiener_index(make_graph(2, {{0, 1}})) == 1);
    CHECK(wiener_index(path_graph(3)) == 4);
    Graph star = make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
    CHECK(wiener_index(star) == 9);
    CHECK_THROWS_AS(wiener_index(make_graph(2, {})), ValidationError);
}

TEST_CASE("wiener_index of a path matches the closed form") {
    for (int n = 2; n <= 20; ++n) {
        long long expect = static_cast<long long>(n) * (n * n - 1) / 6;
        CHECK(wiener_index(path_graph(n)) == expect);
    }
}

TEST_CASE("wiener_index agrees with all-pairs brute force") {
    Rng rng(stream_tag("wiener"));
    int checked = 0;
    for (int trial = 0; trial < 210; ++trial) {
        int n = 2 + rng.uniform_index(11);  // up to 12 nodes
        int max_extra = n * (n - 1) / 2 - (n - 1);
        Graph g = random_connected_graph(n, rng.uniform_index(max_extra + 1), rng.next());
        CHECK(wiener_index(g) == oracles::brute_force_wiener(g));
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("random_tree basics") {
    Graph t1 = random_tree(1, 7);
    CHECK(t1.node_count == 1);
    CHECK(t1.edge_count() == 0);
    Graph t2 = random_tree(2, 9);
    CHECK(t2.edges() == std::vector<Edge>{{0, 1}});
    CHECK_THROWS_AS(random_tree(0, 1), ValidationError);

    Graph a = random_tree(10, 1234), b = random_tree(10, 1234);
    CHECK(a.edges() == b.edges());

    // every draw is a tree: n-1 edges and connected
    Rng rng(stream_tag("trees"));
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + rng.uniform_index(16);
        Graph t = random_tree(n, rng.next());
        CHECK(t.edge_count() == n - 1);
        CHECK(is_connected(t));
    }

    // all 16 labeled trees on 4 nodes show up
    std::set<std::vector<Edge>> shapes;
    for (int i = 0; i < 2000; ++i) shapes.insert(random_tree(4, derive_seed(5, 11, i)).edges());
    CHECK(shapes.size() == 16);
}

TEST_CASE("random_connected_graph basics") {
    Graph tri = random_connected_graph(3, 1, 42);
    CHECK(tri.edge_count() == 3);  // the 3-cycle is the only option
    Graph t = random_connected_graph(5, 0, 42);
    CHECK(t.edge_count() == 4);
    CHECK(find_bridges(t).size() == 4);
    Graph g = random_connected_graph(8, 3, 42);
    CHECK(g.edge_count() == 10);
    CHECK(is_connected(g));
    CHECK_THROWS_AS(random_connected_graph(3, 9, 1), ValidationError);
}

TEST_CASE("graph file format round trip") {
    Graph g = make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}});
    std::string line = format_graph_line(7, g);
    CHECK(line == "g 7 4 0-1,0-2,0-3,1-2");
    GraphRecord rec = parse_graph_line(line, 1);
    CHECK(rec.id == 7);
    CHECK(rec.graph.edges() == g.edges());

    Graph labeled = make_graph(2, {{0, 1}}, {"C", "O"});
    std::string lline = format_graph_line(0, labeled);
    CHECK(lline == "g 0 2 0-1 L C,O");
    GraphRecord lrec = parse_graph_line(lline, 1);
    CHECK(lrec.graph.node_labels == std::vector<std::string>{"C", "O"});

    // edgeless graph omits the edge field
    CHECK(format_graph_line(1, make_graph(1, {})) == "g 1 1");

    std::stringstream buf;
    write_graph_file(buf, {{7, g}, {8, labeled}});
    auto back = read_graph_file(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0].graph.edges() == g.edges());
    CHECK(back[1].graph.node_labels == labeled.node_labels);
}

TEST_CASE("graph file parsing is strict") {
    CHECK_THROWS_AS(parse_graph_line("x 0 2 0-1", 3), ParseError);
    CHECK_THROWS_AS(parse_graph_line("g 0 2 0-1-2", 3), ParseError);
    CHECK_THROWS_AS(parse_graph_line("g 0 2 01", 3), ParseError);
    CHECK_THROWS_AS(parse_graph_line("g 0 2 0-5", 3), ParseError);
    CHECK_THROWS_AS(parse_graph_line("g 0 two 0-1", 3), ParseError);
    CHECK_THROWS_AS(parse_graph_line("g 0 2 0-1 L a", 3), ParseError);
    CHECK_THROWS_AS(parse_graph_line("g 0 2 0-1 extra", 3), ParseError);
    try {
        parse_graph_line("g 0 2 0-1-2", 17);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position == 17);
    }
}

TEST_CASE("induced_subgraph relabels densely and keeps labels") {
    Graph g = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}, {"a", "b", "c", "d", "e"});
    auto sub = induced_subgraph(g, {4, 1, 0});
    CHECK(sub.original == std::vector<int>{0, 1, 4});
    CHECK(sub.graph.node_count == 3);
    CHECK(sub.graph.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
    CHECK(sub.graph.node_labels == std::vector<std::string>{"a", "b", "e"});
}
