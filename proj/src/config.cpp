#include "graphseq/config.hpp"

#include <fstream>
#include <sstream>

#include "graphseq/error.hpp"

namespace graphseq {

const char* to_string(OlrPairSource s) {
    return s == OlrPairSource::full_graph ? "full_graph" : "dfs_subgraph";
}

namespace {

int parse_pos_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ValidationError("config: bad integer for " + key + ": '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ValidationError("config: bad number for " + key + ": '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError("config: bad boolean for " + key + ": '" + v + "'");
}

[[noreturn]] void bad_enum(const std::string& key, const std::string& v) {
    throw ValidationError("config: bad value for " + key + ": '" + v + "'");
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "task") {
        if (value == "wiener_regression") cfg.task = TaskKind::wiener_regression;
        else if (value == "tree_lm") cfg.task = TaskKind::tree_lm;
        else bad_enum(key, value);
    } else if (key == "n") cfg.n = parse_pos_int(key, value);
    else if (key == "extra_edges") cfg.extra_edges = parse_pos_int(key, value);
    else if (key == "train_size") cfg.train_size = parse_pos_int(key, value);
    else if (key == "test_size") cfg.test_size = parse_pos_int(key, value);
    else if (key == "cell") {
        if (value == "vanilla") cfg.cell = CellKind::vanilla;
        else if (value == "lstm") cfg.cell = CellKind::lstm;
        else bad_enum(key, value);
    } else if (key == "sigma_h") {
        if (value == "tanh") cfg.sigma_h = Nonlinearity::tanh_fn;
        else if (value == "sigmoid") cfg.sigma_h = Nonlinearity::sigmoid_fn;
        else if (value == "identity") cfg.sigma_h = Nonlinearity::identity_fn;
        else bad_enum(key, value);
    } else if (key == "hidden_width") cfg.hidden_width = parse_pos_int(key, value);
    else if (key == "embed_width") cfg.embed_width = parse_pos_int(key, value);
    else if (key == "num_layers") cfg.num_layers = parse_pos_int(key, value);
    else if (key == "lambda") cfg.lambda = parse_double(key, value);
    else if (key == "olr_mode") {
        if (value == "output") cfg.olr_mode = OlrTarget::output;
        else if (value == "hidden") cfg.olr_mode = OlrTarget::hidden;
        else bad_enum(key, value);
    } else if (key == "olr_pair_source") {
        if (value == "full_graph") cfg.olr_pair_source = OlrPairSource::full_graph;
        else if (value == "dfs_subgraph") cfg.olr_pair_source = OlrPairSource::dfs_subgraph;
        else bad_enum(key, value);
    } else if (key == "trajectory_count") cfg.trajectory_count = parse_pos_int(key, value);
    else if (key == "min_trajectories") cfg.min_trajectories = parse_pos_int(key, value);
    else if (key == "epochs") cfg.epochs = parse_pos_int(key, value);
    else if (key == "learning_rate") cfg.learning_rate = parse_double(key, value);
    else if (key == "lr_decay") cfg.lr_decay = parse_double(key, value);
    else if (key == "clip_norm") cfg.clip_norm = parse_double(key, value);
    else if (key == "plateau_window") cfg.plateau_window = parse_pos_int(key, value);
    else if (key == "normalize_targets") cfg.normalize_targets = parse_bool(key, value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "oracle_max_nodes") cfg.oracle_max_nodes = parse_pos_int(key, value);
    else if (key == "sample_count") cfg.sample_count = parse_pos_int(key, value);
    else if (key == "k_values") cfg.k_values = value;
    else if (key == "temperature") cfg.temperature = parse_double(key, value);
    else if (key == "max_len") cfg.max_len = parse_pos_int(key, value);
    else throw ValidationError("config: unknown key '" + key + "'");
}

void ExperimentConfig::validate() const {
    if (n < 1 || train_size < 1 || test_size < 1 || hidden_width < 1 || embed_width < 1 ||
        num_layers < 1 ||
        epochs < 1 || trajectory_count < 1 || min_trajectories < 1 || oracle_max_nodes < 1 ||
        sample_count < 1 || max_len < 1 || plateau_window < 1)
        throw ValidationError("config: all sizes must be positive");
    if (lambda < 0.0) throw ValidationError("config: lambda must be >= 0");
    if (learning_rate <= 0.0) throw ValidationError("config: learning_rate must be > 0");
    if (extra_edges < 0) throw ValidationError("config: extra_edges must be >= 0");
    if (temperature < 0.0) throw ValidationError("config: temperature must be >= 0");
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        // strip whitespace-only and comment lines
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line is not key=value", line_number);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_config_entry(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "task=" << to_string(cfg.task) << '\n';
    out << "n=" << cfg.n << '\n';
    out << "extra_edges=" << cfg.extra_edges << '\n';
    out << "train_size=" << cfg.train_size << '\n';
    out << "test_size=" << cfg.test_size << '\n';
    out << "cell=" << to_string(cfg.cell) << '\n';
    out << "sigma_h=" << to_string(cfg.sigma_h) << '\n';
    out << "hidden_width=" << cfg.hidden_width << '\n';
    out << "embed_width=" << cfg.embed_width << '\n';
    out << "num_layers=" << cfg.num_layers << '\n';
    out << "lambda=" << cfg.lambda << '\n';
    out << "olr_mode=" << to_string(cfg.olr_mode) << '\n';
    out << "olr_pair_source=" << to_string(cfg.olr_pair_source) << '\n';
    out << "trajectory_count=" << cfg.trajectory_count << '\n';
    out << "min_trajectories=" << cfg.min_trajectories << '\n';
    out << "epochs=" << cfg.epochs << '\n';
    out << "learning_rate=" << cfg.learning_rate << '\n';
    out << "lr_decay=" << cfg.lr_decay << '\n';
    out << "clip_norm=" << cfg.clip_norm << '\n';
    out << "plateau_window=" << cfg.plateau_window << '\n';
    out << "normalize_targets=" << (cfg.normalize_targets ? "true" : "false") << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "oracle_max_nodes=" << cfg.oracle_max_nodes << '\n';
    out << "sample_count=" << cfg.sample_count << '\n';
    out << "k_values=" << cfg.k_values << '\n';
    out << "temperature=" << cfg.temperature << '\n';
    out << "max_len=" << cfg.max_len << '\n';
    return out.str();
}

}  // namespace graphseq
