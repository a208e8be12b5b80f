#include "graphseq/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "graphseq/error.hpp"

namespace graphseq {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

long long parse_int(const std::string& s, const char* what, std::size_t line) {
    if (s.empty()) throw ParseError(std::string("empty ") + what, line);
    std::size_t pos = 0;
    long long v;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
    }
    if (pos != s.size()) throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
    return v;
}

}  // namespace

std::string format_graph_line(long long id, const Graph& g) {
    std::ostringstream out;
    out << "g " << id << ' ' << g.node_count;
    const auto es = g.edges();
    if (!es.empty()) {
        out << ' ';
        for (std::size_t i = 0; i < es.size(); ++i) {
            if (i) out << ',';
            out << es[i].first << '-' << es[i].second;
        }
    }
    if (g.labeled()) {
        out << " L ";
        for (int v = 0; v < g.node_count; ++v) {
            if (v) out << ',';
            out << g.node_labels[v];
        }
    }
    return out.str();
}

GraphRecord parse_graph_line(const std::string& line, std::size_t line_number) {
    std::istringstream in(line);
    std::vector<std::string> fields;
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    if (fields.size() < 3 || fields[0] != "g")
        throw ParseError("graph line must start with 'g <id> <n>'", line_number);
    GraphRecord rec;
    rec.id = parse_int(fields[1], "graph id", line_number);
    long long n = parse_int(fields[2], "node count", line_number);
    if (n < 0 || n > 10'000'000) throw ParseError("node count out of range", line_number);

    std::size_t next = 3;
    std::vector<Edge> edges;
    if (next < fields.size() && fields[next] != "L") {
        for (const auto& part : split(fields[next], ',')) {
            auto dash = part.find('-');
            if (dash == std::string::npos || dash == 0 || dash + 1 == part.size())
                throw ParseError("bad edge '" + part + "'", line_number);
            long long a = parse_int(part.substr(0, dash), "edge endpoint", line_number);
            long long b = parse_int(part.substr(dash + 1), "edge endpoint", line_number);
            if (a < 0 || a >= n || b < 0 || b >= n)
                throw ParseError("edge endpoint out of range", line_number);
            edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        }
        ++next;
    }
    std::vector<std::string> labels;
    if (next < fields.size()) {
        if (fields[next] != "L" || next + 1 >= fields.size())
            throw ParseError("unexpected trailing field '" + fields[next] + "'", line_number);
        labels = split(fields[next + 1], ',');
        next += 2;
    }
    if (next != fields.size())
        throw ParseError("unexpected trailing field '" + fields[next] + "'", line_number);
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(n))
        throw ParseError("label count does not match node count", line_number);
    try {
        rec.graph = make_graph(static_cast<int>(n), edges, std::move(labels));
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_number);
    }
    return rec;
}

std::vector<GraphRecord> read_graph_file(std::istream& in) {
    std::vector<GraphRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        records.push_back(parse_graph_line(line, line_number));
    }
    return records;
}

std::vector<GraphRecord> read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file '" + path + "'");
    return read_graph_file(in);
}

void write_graph_file(std::ostream& out, const std::vector<GraphRecord>& records) {
    for (const auto& rec : records) out << format_graph_line(rec.id, rec.graph) << '\n';
}

void write_graph_file(const std::string& path, const std::vector<GraphRecord>& records) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write graph file '" + path + "'");
    write_graph_file(out, records);
    if (!out) throw RuntimeFailure("write failed for '" + path + "'");
}

}  // namespace graphseq
