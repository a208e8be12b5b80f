#ifndef GRAPHSEQ_CLI_HPP
#define GRAPHSEQ_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace graphseq {

// Runs one CLI invocation (args excludes the program name). Exit codes:
// 0 success, 1 usage error, 2 data/validation error, 3 runtime failure.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace graphseq

#endif  // GRAPHSEQ_CLI_HPP
