#ifndef GRAPHSEQ_GRAPH_IO_HPP
#define GRAPHSEQ_GRAPH_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "graphseq/graph.hpp"

namespace graphseq {

// One graph per line:
//   g <id> <n> <i-j>,<i-j>,...    optionally followed by   L <label0>,<label1>,...
// Edges are written canonically (smaller index first) and sorted; the edge
// field is omitted for edgeless graphs. Parsing is strict: malformed lines
// raise ParseError carrying the 1-based line number.
struct GraphRecord {
    long long id = 0;
    Graph graph;
};

std::string format_graph_line(long long id, const Graph& g);
GraphRecord parse_graph_line(const std::string& line, std::size_t line_number = 0);

std::vector<GraphRecord> read_graph_file(std::istream& in);
std::vector<GraphRecord> read_graph_file(const std::string& path);
void write_graph_file(std::ostream& out, const std::vector<GraphRecord>& records);
void write_graph_file(const std::string& path, const std::vector<GraphRecord>& records);

}  // namespace graphseq

#endif  // GRAPHSEQ_GRAPH_IO_HPP
