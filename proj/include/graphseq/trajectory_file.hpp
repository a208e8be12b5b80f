#ifndef GRAPHSEQ_TRAJECTORY_FILE_HPP
#define GRAPHSEQ_TRAJECTORY_FILE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "graphseq/graph.hpp"

namespace graphseq {

// One graph's precomputed traversals sharing an end vertex. Stored one record
// per line as
//   <graph_id>\t<canonical_sequence>\t<traj_1>|<traj_2>|...
// using the codec's canonical string form. Because '|' separates trajectories,
// records are restricted to graphs whose node symbols are single characters
// (labels of length 1, or unlabeled graphs with at most 62 nodes).
struct TrajectoryRecord {
    long long graph_id = 0;
    std::string canonical_sequence;
    std::vector<std::string> trajectories;
};

std::string format_trajectory_line(const TrajectoryRecord& rec);
TrajectoryRecord parse_trajectory_line(const std::string& line, std::size_t line_number = 0);

std::vector<TrajectoryRecord> read_trajectory_file(std::istream& in);
std::vector<TrajectoryRecord> read_trajectory_file(const std::string& path);
void write_trajectory_file(std::ostream& out, const std::vector<TrajectoryRecord>& records);
void write_trajectory_file(const std::string& path, const std::vector<TrajectoryRecord>& records);

// Full validation against the record's graph: every trajectory decodes to a
// valid ordering, all share their final node, and they are pairwise distinct.
// Throws ValidationError naming the record on any violation; files are
// self-checking on load through this.
void validate_record(const Graph& g, const TrajectoryRecord& rec);

}  // namespace graphseq

#endif  // GRAPHSEQ_TRAJECTORY_FILE_HPP
