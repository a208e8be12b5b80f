#include "graphseq/trajectory_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "graphseq/codec.hpp"
#include "graphseq/dfs.hpp"
#include "graphseq/error.hpp"

namespace graphseq {

std::string format_trajectory_line(const TrajectoryRecord& rec) {
    std::ostringstream out;
    out << rec.graph_id << '\t' << rec.canonical_sequence << '\t';
    for (std::size_t i = 0; i < rec.trajectories.size(); ++i) {
        if (i) out << '|';
        out << rec.trajectories[i];
    }
    return out.str();
}

TrajectoryRecord parse_trajectory_line(const std::string& line, std::size_t line_number) {
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
        throw ParseError("trajectory record needs 3 tab-separated fields", line_number);
    TrajectoryRecord rec;
    try {
        rec.graph_id = std::stoll(line.substr(0, tab1));
    } catch (const std::exception&) {
        throw ParseError("bad graph id '" + line.substr(0, tab1) + "'", line_number);
    }
    rec.canonical_sequence = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string rest = line.substr(tab2 + 1);
    if (rest.empty()) throw ParseError("record has no trajectories", line_number);
    std::string cur;
    for (char c : rest) {
        if (c == '|') {
            rec.trajectories.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    rec.trajectories.push_back(cur);
    for (const auto& t : rec.trajectories)
        if (t.empty()) throw ParseError("empty trajectory string", line_number);
    return rec;
}

std::vector<TrajectoryRecord> read_trajectory_file(std::istream& in) {
    std::vector<TrajectoryRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        records.push_back(parse_trajectory_line(line, line_number));
    }
    return records;
}

std::vector<TrajectoryRecord> read_trajectory_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trajectory file '" + path + "'");
    return read_trajectory_file(in);
}

void write_trajectory_file(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
    for (const auto& rec : records) out << format_trajectory_line(rec) << '\n';
}

void write_trajectory_file(const std::string& path,
                           const std::vector<TrajectoryRecord>& records) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write trajectory file '" + path + "'");
    write_trajectory_file(out, records);
    if (!out) throw RuntimeFailure("write failed for '" + path + "'");
}

void validate_record(const Graph& g, const TrajectoryRecord& rec) {
    const std::string where = "trajectory record " + std::to_string(rec.graph_id);
    if (needs_delimited_symbols(g))
        throw ValidationError(where + ": graph needs delimited symbols, which conflict "
                                      "with the trajectory file format");
    if (rec.trajectories.empty()) throw ValidationError(where + ": no trajectories");
    std::set<std::string> distinct(rec.trajectories.begin(), rec.trajectories.end());
    if (distinct.size() != rec.trajectories.size())
        throw ValidationError(where + ": duplicate trajectories");
    int common_end = -1;
    auto check_one = [&](const std::string& s, bool constrain_end) {
        auto seq = sequence_on_graph(g, parse_canonical_string(s));
        if (!is_valid_ordering(g, seq))
            throw ValidationError(where + ": '" + s + "' is not a valid ordering");
        if (constrain_end) {
            if (common_end == -1) common_end = seq.back();
            else if (seq.back() != common_end)
                throw ValidationError(where + ": trajectories do not share an end vertex");
        }
    };
    check_one(rec.canonical_sequence, false);
    for (const auto& t : rec.trajectories) check_one(t, true);
}

}  // namespace graphseq
