#include "graphseq/codec.hpp"

#include <algorithm>
#include <map>

#include "graphseq/error.hpp"

namespace graphseq {

namespace {

const char kBase62[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

bool is_paren(const std::string& t) { return t == "(" || t == ")"; }

}  // namespace

Vocabulary Vocabulary::anonymized() {
    Vocabulary v;
    v.mode_ = VocabMode::anonymized;
    v.symbols_ = {"v"};
    return v;
}

Vocabulary Vocabulary::labeled(std::vector<std::string> symbols) {
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
    for (const auto& s : symbols)
        if (s.empty() || is_paren(s) || s.find('|') != std::string::npos)
            throw ValidationError("vocabulary symbol '" + s + "' is reserved");
    Vocabulary v;
    v.mode_ = VocabMode::labeled;
    v.symbols_ = std::move(symbols);
    return v;
}

int Vocabulary::size() const { return kFirstSymbol + static_cast<int>(symbols_.size()); }

int Vocabulary::symbol_id(const std::string& symbol) const {
    if (mode_ == VocabMode::anonymized) return kFirstSymbol;
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
    if (it == symbols_.end() || *it != symbol)
        throw ValidationError("symbol '" + symbol + "' not in vocabulary");
    return kFirstSymbol + static_cast<int>(it - symbols_.begin());
}

std::string Vocabulary::token_name(int id) const {
    switch (id) {
        case kBos: return "<bos>";
        case kEos: return "<eos>";
        case kOpen: return "(";
        case kClose: return ")";
        default: break;
    }
    int i = id - kFirstSymbol;
    if (i < 0 || i >= static_cast<int>(symbols_.size()))
        throw ValidationError("token id out of range");
    return symbols_[i];
}

std::string node_symbol(const Graph& g, int node) {
    if (g.labeled()) return g.node_labels[node];
    if (node < 62) return std::string(1, kBase62[node]);
    return std::to_string(node);
}

bool needs_delimited_symbols(const Graph& g) {
    for (int v = 0; v < g.node_count; ++v)
        if (node_symbol(g, v).size() != 1) return true;
    return false;
}

TokenSequence encode(const Graph& g, const Ordering& ordering) {
    const auto& seq = ordering.visit_sequence;
    if (seq.empty()) throw ValidationError("encode: empty ordering");
    std::vector<std::vector<int>> children(g.node_count);
    int root = -1;
    std::vector<char> seen(g.node_count, 0);
    for (int v : seq) {
        if (v < 0 || v >= g.node_count || seen[v])
            throw ValidationError("encode: visit_sequence is not a set of nodes");
        seen[v] = 1;
    }
    // children in first-visit order
    for (int v : seq) {
        int p = ordering.parent_of[v];
        if (p == -1) {
            if (root != -1) throw ValidationError("encode: multiple roots in parent_of");
            root = v;
        } else {
            if (p < 0 || p >= g.node_count || !seen[p])
                throw ValidationError("encode: parent outside the ordering");
            children[p].push_back(v);
        }
    }
    if (root != seq.front())
        throw ValidationError("encode: root does not match first visited node");
    // parents must precede children in visit order
    std::vector<int> pos(g.node_count, -1);
    for (std::size_t i = 0; i < seq.size(); ++i) pos[seq[i]] = static_cast<int>(i);
    for (int v : seq) {
        int p = ordering.parent_of[v];
        if (p != -1 && pos[p] > pos[v])
            throw ValidationError("encode: parent visited after child");
    }

    TokenSequence ts;
    auto emit = [&](auto&& self, int v) -> void {
        ts.tokens.push_back(node_symbol(g, v));
        const auto& ch = children[v];
        for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
            ts.tokens.push_back("(");
            self(self, ch[i]);
            ts.tokens.push_back(")");
        }
        if (!ch.empty()) self(self, ch.back());
    };
    emit(emit, root);
    return ts;
}

Decoded decode(const TokenSequence& ts) {
    const auto& toks = ts.tokens;
    if (toks.empty()) throw ParseError("empty token sequence", 0);
    std::size_t pos = 0;
    std::vector<std::string> labels;
    std::vector<Edge> edges;
    std::vector<int> parents;

    // node := symbol group* bare-child?   where a bare child must follow any
    // groups (last-child-bare convention)
    auto parse_node = [&](auto&& self, int parent) -> void {
        if (pos >= toks.size()) throw ParseError("unexpected end of tokens", pos);
        if (is_paren(toks[pos]))
            throw ParseError("expected a node symbol, got '" + toks[pos] + "'", pos);
        int node = static_cast<int>(labels.size());
        labels.push_back(toks[pos]);
        parents.push_back(parent);
        if (parent != -1) edges.push_back(canonical_edge(parent, node));
        ++pos;
        bool saw_group = false;
        while (pos < toks.size() && toks[pos] == "(") {
            saw_group = true;
            std::size_t open_pos = pos;
            ++pos;
            if (pos < toks.size() && toks[pos] == ")")
                throw ParseError("empty parenthesized group", open_pos);
            self(self, node);
            if (pos >= toks.size() || toks[pos] != ")")
                throw ParseError("unbalanced parentheses", open_pos);
            ++pos;
        }
        if (pos < toks.size() && !is_paren(toks[pos])) {
            self(self, node);  // bare last child
        } else if (saw_group) {
            throw ParseError("unexpected trailing group", pos == 0 ? 0 : pos - 1);
        }
    };

    parse_node(parse_node, -1);
    if (pos != toks.size()) throw ParseError("unexpected token '" + toks[pos] + "'", pos);

    Decoded out;
    out.tree = make_graph(static_cast<int>(labels.size()), edges, labels);
    out.ordering.parent_of = std::move(parents);
    out.ordering.visit_sequence.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        out.ordering.visit_sequence[i] = static_cast<int>(i);
    return out;
}

std::vector<int> sequence_on_graph(const Graph& g, const TokenSequence& ts) {
    Decoded dec = decode(ts);
    std::map<std::string, int> by_symbol;
    for (int v = 0; v < g.node_count; ++v) {
        std::string s = node_symbol(g, v);
        if (!by_symbol.emplace(s, v).second)
            throw ValidationError("graph has ambiguous node symbols ('" + s + "')");
    }
    std::vector<int> seq;
    seq.reserve(dec.ordering.visit_sequence.size());
    for (int local : dec.ordering.visit_sequence) {
        const std::string& s = dec.tree.node_labels[local];
        auto it = by_symbol.find(s);
        if (it == by_symbol.end())
            throw ValidationError("symbol '" + s + "' names no node of the graph");
        seq.push_back(it->second);
    }
    return seq;
}

std::vector<int> tokenize(const TokenSequence& ts, const Vocabulary& vocab) {
    std::vector<int> ids;
    ids.reserve(ts.tokens.size() + 2);
    ids.push_back(Vocabulary::kBos);
    for (const auto& t : ts.tokens) {
        if (t == "(")
            ids.push_back(Vocabulary::kOpen);
        else if (t == ")")
            ids.push_back(Vocabulary::kClose);
        else
            ids.push_back(vocab.symbol_id(t));
    }
    ids.push_back(Vocabulary::kEos);
    return ids;
}

TokenSequence detokenize(const std::vector<int>& ids, const Vocabulary& vocab) {
    TokenSequence ts;
    for (int id : ids) {
        if (id == Vocabulary::kBos || id == Vocabulary::kEos) continue;
        ts.tokens.push_back(vocab.token_name(id));
    }
    return ts;
}

std::string canonical_string(const TokenSequence& ts) {
    bool delimited = false;
    for (const auto& t : ts.tokens)
        if (!is_paren(t) && t.size() != 1) delimited = true;
    std::string out;
    bool prev_symbol = false;
    for (const auto& t : ts.tokens) {
        bool symbol = !is_paren(t);
        if (delimited && symbol && prev_symbol) out += '|';
        out += t;
        prev_symbol = symbol;
    }
    return out;
}

TokenSequence parse_canonical_string(const std::string& s, SymbolMode mode) {
    TokenSequence ts;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '(' || c == ')') {
            ts.tokens.push_back(std::string(1, c));
            ++i;
        } else if (c == '|') {
            throw ParseError("unexpected '|'", i);
        } else if (mode == SymbolMode::single_char) {
            ts.tokens.push_back(std::string(1, c));
            ++i;
        } else {
            std::size_t j = i;
            while (j < s.size() && s[j] != '(' && s[j] != ')' && s[j] != '|') ++j;
            ts.tokens.push_back(s.substr(i, j - i));
            i = j;
            if (i < s.size() && s[i] == '|') ++i;
        }
    }
    return ts;
}

}  // namespace graphseq
