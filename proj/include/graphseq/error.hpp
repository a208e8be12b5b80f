#ifndef GRAPHSEQ_ERROR_HPP
#define GRAPHSEQ_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphseq {

// Bad input data or violated precondition. CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal failure at runtime (divergence, unwritable sink). Exit code 3.
struct RuntimeFailure : std::runtime_error {
    explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed text input; carries a 1-based line (files) or 0-based token
// position (codec strings).
struct ParseError : ValidationError {
    ParseError(const std::string& msg, std::size_t where)
        : ValidationError(msg + " (at " + std::to_string(where) + ")"), position(where) {}
    std::size_t position;
};

}  // namespace graphseq

#endif  // GRAPHSEQ_ERROR_HPP
