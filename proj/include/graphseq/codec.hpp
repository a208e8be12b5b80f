#ifndef GRAPHSEQ_CODEC_HPP
#define GRAPHSEQ_CODEC_HPP

#include <string>
#include <vector>

#include "graphseq/dfs.hpp"
#include "graphseq/graph.hpp"

namespace graphseq {

// Parenthesized serialization of a DFS tree: pre-order node symbols, every
// child subtree except the last wrapped in parentheses, the last child bare
// ("A(BEF)(C)D" has D as A's last branch).
struct TokenSequence {
    std::vector<std::string> tokens;  // node symbols plus "(" and ")"
};

enum class VocabMode { anonymized, labeled };

// Token ids are dense and stable: 0 BOS, 1 EOS, 2 "(", 3 ")", then node
// symbols (a single shared node token under anonymized mode).
class Vocabulary {
public:
    static constexpr int kBos = 0;
    static constexpr int kEos = 1;
    static constexpr int kOpen = 2;
    static constexpr int kClose = 3;
    static constexpr int kFirstSymbol = 4;

    static Vocabulary anonymized();
    static Vocabulary labeled(std::vector<std::string> symbols);  // sorted, deduped

    VocabMode mode() const { return mode_; }
    int size() const;
    // id for a node symbol; throws under labeled mode when unknown
    int symbol_id(const std::string& symbol) const;
    std::string token_name(int id) const;
    const std::vector<std::string>& symbols() const { return symbols_; }

    bool operator==(const Vocabulary&) const = default;

private:
    VocabMode mode_ = VocabMode::anonymized;
    std::vector<std::string> symbols_;
};

// Symbol naming for nodes: the node's label when the graph is labeled,
// otherwise a base-62 character for indices below 62 and the decimal index
// beyond that (which forces delimited string form).
std::string node_symbol(const Graph& g, int node);
bool needs_delimited_symbols(const Graph& g);

// Serializes the ordering's DFS tree. The ordering must be valid for g with
// parent_of set (as produced by check_ordering / the samplers).
TokenSequence encode(const Graph& g, const Ordering& ordering);

// Tree rebuilt from a token sequence: nodes are indexed in visit order and
// carry their symbols as labels; ordering.visit_sequence is 0..k-1.
struct Decoded {
    Graph tree;
    Ordering ordering;
};

// Throws ParseError (with token position) on unbalanced or empty groups, a
// leading "(", or a parenthesized last child ("unexpected trailing group").
Decoded decode(const TokenSequence& ts);

// Maps a decoded sequence back onto g's node ids via labels (which must be
// unique) or base-62/decimal index symbols.
std::vector<int> sequence_on_graph(const Graph& g, const TokenSequence& ts);

// BOS + ids + EOS. Unknown symbol under labeled vocab throws.
std::vector<int> tokenize(const TokenSequence& ts, const Vocabulary& vocab);

// Inverse of tokenize for well-formed id sequences (BOS/EOS stripped).
// Under anonymized vocab every node token becomes the symbol "v".
TokenSequence detokenize(const std::vector<int>& ids, const Vocabulary& vocab);

enum class SymbolMode { single_char, delimited };

// Canonical string form: symbols and parentheses concatenated without
// whitespace; in delimited mode adjacent symbols are separated by "|".
std::string canonical_string(const TokenSequence& ts);
TokenSequence parse_canonical_string(const std::string& s,
                                     SymbolMode mode = SymbolMode::single_char);

}  // namespace graphseq

#endif  // GRAPHSEQ_CODEC_HPP
