#ifndef GRAPHSEQ_CONFIG_HPP
#define GRAPHSEQ_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "graphseq/recurrent.hpp"

namespace graphseq {

enum class OlrPairSource { full_graph, dfs_subgraph };
const char* to_string(OlrPairSource);

// Flat key=value experiment configuration. Every key has a default; unknown
// keys are errors. '#' starts a comment line.
struct ExperimentConfig {
    TaskKind task = TaskKind::wiener_regression;
    int n = 10;                 // graph size
    int extra_edges = 0;        // 0 keeps the graphs trees
    int train_size = 50;
    int test_size = 200;

    CellKind cell = CellKind::lstm;
    Nonlinearity sigma_h = Nonlinearity::tanh_fn;
    int hidden_width = 100;
    int embed_width = 16;
    int num_layers = 1;

    double lambda = 1.0;        // OLR weight
    OlrTarget olr_mode = OlrTarget::output;
    OlrPairSource olr_pair_source = OlrPairSource::full_graph;
    int trajectory_count = 10;  // traversals per record
    int min_trajectories = 2;   // records below this are unusable for pairs

    int epochs = 500;           // hard budget
    double learning_rate = 0.05;
    double lr_decay = 1.0;      // multiplicative, applied per epoch
    double clip_norm = 5.0;
    int plateau_window = 50;    // epochs of no train-loss improvement after
                                // perfect rounded accuracy before stopping
    bool normalize_targets = true;

    std::uint64_t seed = 1;
    int oracle_max_nodes = 8;

    // generation evaluation (tree_lm)
    int sample_count = 1000;
    std::string k_values = "10,100";
    double temperature = 1.0;
    int max_len = 64;

    void validate() const;  // throws ValidationError
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
// Applies one "key=value" assignment (used for config parsing and flag overrides).
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);
// Resolved config, one key=value per line, every key present.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace graphseq

#endif  // GRAPHSEQ_CONFIG_HPP
