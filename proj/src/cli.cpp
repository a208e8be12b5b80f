#include "graphseq/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "graphseq/codec.hpp"
#include "graphseq/config.hpp"
#include "graphseq/dfs.hpp"
#include "graphseq/error.hpp"
#include "graphseq/graph_io.hpp"
#include "graphseq/invariance.hpp"
#include "graphseq/pipeline.hpp"
#include "graphseq/rng.hpp"

namespace graphseq {

namespace {

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ValidationError("--set expects key=value, got '" + kv + "'");
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
}

void echo_config(std::ostream& out, const ExperimentConfig& cfg) {
    std::istringstream lines(serialize_config(cfg));
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw RuntimeFailure("cannot write '" + path + "'");
    return f;
}

// items for every record in the file, serialized via the config seed
std::vector<DatasetItem> items_from_graphs(const ExperimentConfig& cfg,
                                           const std::vector<GraphRecord>& records) {
    ExperimentConfig c = cfg;
    c.train_size = 1;
    c.test_size = std::max(1, static_cast<int>(records.size()) - 1);
    if (records.empty()) throw ValidationError("graph file holds no graphs");
    WienerDataset data = dataset_from_graphs(c, records);
    std::vector<DatasetItem> items = std::move(data.train);
    for (auto& it : data.test) items.push_back(std::move(it));
    return items;
}

void require_anonymized_vocab(const RecurrentModel& model) {
    if (model.vocab.mode() != VocabMode::anonymized)
        throw ValidationError("vocabulary mismatch between model and data "
                              "(model expects labeled symbols)");
}

int cmd_gen_graphs(int n, int count, int extra_edges, std::uint64_t seed,
                   const std::string& out_path, std::ostream& out) {
    std::vector<GraphRecord> records;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = derive_seed(seed, stream_tag("gen"), i);
        Graph g = extra_edges > 0 ? random_connected_graph(n, extra_edges, s)
                                  : random_tree(n, s);
        records.push_back({i, std::move(g)});
    }
    write_graph_file(out_path, records);
    out << "wrote " << records.size() << " graphs to " << out_path << '\n';
    return 0;
}

int cmd_trajectories(const std::string& in_path, const std::string& out_path, int count,
                     std::uint64_t seed, std::ostream& out) {
    auto graphs = read_graph_file(in_path);
    std::vector<TrajectoryRecord> records;
    PrecomputeSummary summary = precompute_trajectories(graphs, count, seed, records);
    write_trajectory_file(out_path, records);
    out << "generated=" << summary.generated << " skipped=" << summary.skipped << '\n';
    for (const auto& [id, reason] : summary.skipped_reasons)
        out << "skipped graph " << id << ": " << reason << '\n';
    return 0;
}

int cmd_filter(const std::string& in_path, const std::string& out_path, int min_trajectories,
               std::ostream& out) {
    auto records = read_trajectory_file(in_path);
    FilterStats stats = filter_records(records, min_trajectories);
    write_trajectory_file(out_path, records);
    out << "kept=" << stats.kept << " dropped=" << stats.dropped
        << " retention=" << stats.retention() << '\n';
    return 0;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& sets,
              const std::string& data_path, const std::string& traj_path,
              const std::string& model_path, const std::string& log_path,
              std::ostream& out) {
    ExperimentConfig cfg = parse_config_file(config_path);
    apply_overrides(cfg, sets);

    WienerDataset data;
    if (!data_path.empty()) {
        data = dataset_from_graphs(cfg, read_graph_file(data_path));
    } else {
        data = build_wiener_dataset(cfg);
    }

    std::vector<TrajectoryRecord> records;
    if (cfg.lambda > 0.0 && cfg.olr_pair_source == OlrPairSource::full_graph) {
        if (!traj_path.empty()) {
            records = read_trajectory_file(traj_path);
            std::map<long long, const Graph*> by_id;
            for (const auto& item : data.train) by_id[item.graph_id] = &item.graph;
            for (const auto& rec : records) {
                auto it = by_id.find(rec.graph_id);
                if (it != by_id.end()) validate_record(*it->second, rec);
            }
        } else {
            std::vector<GraphRecord> train_graphs;
            for (const auto& item : data.train)
                train_graphs.push_back({item.graph_id, item.graph});
            PrecomputeSummary summary =
                precompute_trajectories(train_graphs, cfg.trajectory_count, cfg.seed, records);
            out << "trajectories generated=" << summary.generated
                << " skipped=" << summary.skipped << '\n';
        }
        filter_records(records, std::min(cfg.min_trajectories, 2));
    }

    std::ofstream log_file;
    std::ostream* log = nullptr;
    if (!log_path.empty()) {
        log_file = open_out(log_path);
        echo_config(log_file, cfg);
        log = &log_file;
    }
    TrainResult result = train(cfg, data, records.empty() ? nullptr : &records, log);
    save_model(model_path, result.model);
    const EpochStats& last = result.log.back();
    out << "epochs=" << result.epochs_run << " task_loss=" << last.task_loss
        << " olr_loss=" << last.olr_loss << " train_acc=" << last.train_acc
        << " perfect_train_acc=" << (result.reached_perfect_train_acc ? 1 : 0) << '\n';
    out << "model written to " << model_path << '\n';
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& metrics_path, const std::string& dump_path,
             const std::vector<std::string>& sets, std::ostream& out) {
    RecurrentModel model = load_model(model_path);
    ExperimentConfig cfg;
    cfg.task = model.task;
    apply_overrides(cfg, sets);
    auto records = read_graph_file(data_path);
    if (records.empty()) throw ValidationError("graph file holds no graphs");
    require_anonymized_vocab(model);
    auto items = items_from_graphs(cfg, records);

    std::ostringstream metrics;
    if (model.task == TaskKind::wiener_regression) {
        RegressionMetrics m = evaluate_regression(model, items);
        metrics << "mae=" << m.mae << '\n'
                << "rounded_accuracy=" << m.rounded_accuracy << '\n';
        if (!dump_path.empty()) {
            auto f = open_out(dump_path);
            char buf[64];
            for (std::size_t i = 0; i < m.predictions.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", m.predictions[i]);
                f << items[i].graph_id << ' ' << buf << ' ' << items[i].target << '\n';
            }
        }
    } else {
        std::set<std::string> reference;
        for (const auto& it : items) reference.insert(it.canonical);
        GenerationMetrics g =
            evaluate_generation(model, reference, parse_k_values(cfg.k_values),
                                cfg.sample_count, cfg.temperature, cfg.max_len, cfg.seed);
        metrics << "validity=" << g.validity << '\n';
        for (const auto& [k, v] : g.unique_at) metrics << "unique_at_" << k << '=' << v << '\n';
        metrics << "novelty=" << g.novelty << '\n';
    }
    out << metrics.str();
    if (!metrics_path.empty()) {
        auto f = open_out(metrics_path);
        echo_config(f, cfg);
        f << metrics.str();
    }
    return 0;
}

int cmd_generate(const std::string& model_path, int count, double temperature, int max_len,
                 std::uint64_t seed, const std::string& out_path, bool valid_only,
                 std::ostream& out) {
    RecurrentModel model = load_model(model_path);
    std::ostringstream lines;
    int written = 0;
    for (int i = 0; i < count; ++i) {
        auto ids = sample_sequence(model, max_len, temperature,
                                   derive_seed(seed, stream_tag("sample"), i));
        std::string s = canonical_string(detokenize(ids, model.vocab));
        if (valid_only) {
            try {
                decode(parse_canonical_string(s));
            } catch (const ValidationError&) {
                continue;
            }
        }
        lines << s << '\n';
        ++written;
    }
    if (!out_path.empty()) {
        auto f = open_out(out_path);
        f << lines.str();
        out << "wrote " << written << " sequences to " << out_path << '\n';
    } else {
        out << lines.str();
    }
    return 0;
}

int cmd_oracle(const std::string& in_path, const std::string& mode, int graph_index,
               int vertex, int bound, const std::string& model_path, std::ostream& out) {
    auto records = read_graph_file(in_path);
    if (graph_index < 0 || graph_index >= static_cast<int>(records.size()))
        throw ValidationError("--graph-index out of range");
    const Graph& g = records[graph_index].graph;
    auto print_seqs = [&](const std::set<std::vector<int>>& seqs) {
        out << "orderings=" << seqs.size() << '\n';
        for (const auto& seq : seqs) {
            for (std::size_t i = 0; i < seq.size(); ++i) out << (i ? "," : "") << seq[i];
            out << '\n';
        }
    };
    if (mode == "enumerate") {
        print_seqs(enumerate_orderings(g, bound));
    } else if (mode == "end-at") {
        if (vertex < 0) throw ValidationError("--vertex is required for end-at");
        print_seqs(enumerate_orderings_ending_at(g, vertex, bound));
    } else if (mode == "invariance-gap") {
        if (model_path.empty()) throw ValidationError("--model is required for invariance-gap");
        RecurrentModel model = load_model(model_path);
        require_anonymized_vocab(model);
        out << "invariance_gap=" << structure_invariance_gap(model, g, model.vocab, bound)
            << '\n';
    } else {
        throw ValidationError("unknown oracle mode '" + mode + "'");
    }
    return 0;
}

int cmd_wiener(const std::string& config_path, const std::vector<std::string>& sets,
               const std::string& lambdas_csv, int num_seeds, int threads,
               const std::string& out_path, std::ostream& out) {
    ExperimentConfig cfg = parse_config_file(config_path);
    apply_overrides(cfg, sets);
    std::vector<double> lambdas;
    for (const auto& tok : [&] {
             std::vector<std::string> parts;
             std::string cur;
             for (char c : lambdas_csv) {
                 if (c == ',') {
                     parts.push_back(cur);
                     cur.clear();
                 } else {
                     cur += c;
                 }
             }
             parts.push_back(cur);
             return parts;
         }()) {
        if (tok.empty()) throw ValidationError("bad --lambdas list");
        lambdas.push_back(std::stod(tok));
    }
    WienerExperimentReport report =
        run_wiener_experiment(cfg, lambdas, num_seeds, threads, &out);
    std::string text = format_experiment_report(report);
    out << text;
    if (!out_path.empty()) {
        auto f = open_out(out_path);
        echo_config(f, cfg);
        f << text;
    }
    return 0;
}

int cmd_stats(const std::string& in_path, bool per_graph, std::ostream& out) {
    auto records = read_graph_file(in_path);
    int connected = 0, one_ec = 0, two_ec = 0, higher = 0;
    for (const auto& rec : records) {
        const Graph& g = rec.graph;
        const bool conn = is_connected(g);
        connected += conn;
        std::string cls = "disconnected";
        long long w = -1;
        if (conn && g.node_count >= 2) {
            switch (edge_connectivity_class(g)) {
                case EdgeConnectivity::one_edge_connected: ++one_ec; cls = "one_edge_connected"; break;
                case EdgeConnectivity::two_edge_connected: ++two_ec; cls = "two_edge_connected"; break;
                case EdgeConnectivity::higher: ++higher; cls = "higher"; break;
            }
            w = wiener_index(g);
        } else if (conn) {
            cls = "single_node";
            w = 0;
        }
        if (per_graph)
            out << "id=" << rec.id << " n=" << g.node_count << " edges=" << g.edge_count()
                << " class=" << cls << " wiener=" << w << '\n';
    }
    const double denom = records.empty() ? 1.0 : static_cast<double>(records.size());
    out << "graphs=" << records.size() << " connected=" << connected
        << " one_edge_connected=" << one_ec << " two_edge_connected=" << two_ec
        << " higher=" << higher << '\n';
    out << "fraction_one_edge_connected=" << one_ec / denom << '\n';
    return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"graph-to-sequence toolkit: DFS orderings, codecs, recurrent models"};
    app.require_subcommand(1);

    // gen-graphs
    auto* gen = app.add_subcommand("gen-graphs", "write random connected graphs");
    int gen_n = 10, gen_count = 1, gen_extra = 0;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--n", gen_n, "nodes per graph");
    gen->add_option("--count", gen_count, "number of graphs");
    gen->add_option("--extra-edges", gen_extra, "non-tree edges per graph");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--out", gen_out, "output graph file")->required();

    // trajectories
    auto* traj = app.add_subcommand("trajectories", "precompute common-end traversals");
    std::string traj_in, traj_out;
    int traj_count = 10;
    std::uint64_t traj_seed = 1;
    traj->add_option("--in", traj_in, "input graph file")->required();
    traj->add_option("--out", traj_out, "output trajectory file")->required();
    traj->add_option("--count", traj_count, "traversals per graph");
    traj->add_option("--seed", traj_seed, "master seed");

    // filter
    auto* filt = app.add_subcommand("filter", "drop records with few trajectories");
    std::string filt_in, filt_out;
    int filt_min = 10;
    filt->add_option("--in", filt_in)->required();
    filt->add_option("--out", filt_out)->required();
    filt->add_option("--min", filt_min, "minimum distinct trajectories");

    // train
    auto* tr = app.add_subcommand("train", "train a model per config");
    std::string tr_config, tr_data, tr_traj, tr_model, tr_log;
    std::vector<std::string> tr_sets;
    tr->add_option("--config", tr_config)->required();
    tr->add_option("--data", tr_data, "graph file (generated from config when absent)");
    tr->add_option("--trajectories", tr_traj, "trajectory file for OLR pairs");
    tr->add_option("--out-model", tr_model)->required();
    tr->add_option("--log", tr_log, "training log file");
    tr->add_option("--set", tr_sets, "config override key=value");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a model checkpoint");
    std::string ev_model, ev_data, ev_metrics, ev_dump;
    std::vector<std::string> ev_sets;
    ev->add_option("--model", ev_model)->required();
    ev->add_option("--data", ev_data, "graph file")->required();
    ev->add_option("--metrics-out", ev_metrics);
    ev->add_option("--dump-predictions", ev_dump);
    ev->add_option("--set", ev_sets, "config override key=value");

    // generate
    auto* ge = app.add_subcommand("generate", "sample sequences from a model");
    std::string ge_model, ge_out;
    int ge_count = 10, ge_max_len = 64;
    double ge_temp = 1.0;
    std::uint64_t ge_seed = 1;
    bool ge_valid_only = false;
    ge->add_option("--model", ge_model)->required();
    ge->add_option("--count", ge_count);
    ge->add_option("--temperature", ge_temp);
    ge->add_option("--max-len", ge_max_len);
    ge->add_option("--seed", ge_seed);
    ge->add_option("--out", ge_out);
    ge->add_flag("--valid-only", ge_valid_only);

    // oracle
    auto* orc = app.add_subcommand("oracle", "exhaustive enumeration oracles");
    std::string orc_in, orc_mode, orc_model;
    int orc_index = 0, orc_vertex = -1, orc_bound = kDefaultOracleMaxNodes;
    orc->add_option("--in", orc_in)->required();
    orc->add_option("--mode", orc_mode, "enumerate | end-at | invariance-gap")->required();
    orc->add_option("--graph-index", orc_index);
    orc->add_option("--vertex", orc_vertex);
    orc->add_option("--bound", orc_bound, "oracle node bound");
    orc->add_option("--model", orc_model);

    // wiener
    auto* wi = app.add_subcommand("wiener", "paired regression experiment");
    std::string wi_config, wi_lambdas = "0.1,1,10", wi_out;
    int wi_seeds = 5, wi_threads = 2;
    std::vector<std::string> wi_sets;
    wi->add_option("--config", wi_config)->required();
    wi->add_option("--lambdas", wi_lambdas, "comma-separated OLR weights");
    wi->add_option("--num-seeds", wi_seeds);
    wi->add_option("--threads", wi_threads);
    wi->add_option("--out", wi_out, "report file");
    wi->add_option("--set", wi_sets, "config override key=value");

    // stats
    auto* st = app.add_subcommand("stats", "connectivity statistics for a graph file");
    std::string st_in;
    bool st_per_graph = false;
    st->add_option("--in", st_in)->required();
    st->add_flag("--per-graph", st_per_graph);

    std::vector<const char*> argv;
    argv.push_back("graphseq");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen_graphs(gen_n, gen_count, gen_extra, gen_seed, gen_out, out);
        if (traj->parsed()) return cmd_trajectories(traj_in, traj_out, traj_count, traj_seed, out);
        if (filt->parsed()) return cmd_filter(filt_in, filt_out, filt_min, out);
        if (tr->parsed())
            return cmd_train(tr_config, tr_sets, tr_data, tr_traj, tr_model, tr_log, out);
        if (ev->parsed()) return cmd_eval(ev_model, ev_data, ev_metrics, ev_dump, ev_sets, out);
        if (ge->parsed())
            return cmd_generate(ge_model, ge_count, ge_temp, ge_max_len, ge_seed, ge_out,
                                ge_valid_only, out);
        if (orc->parsed())
            return cmd_oracle(orc_in, orc_mode, orc_index, orc_vertex, orc_bound, orc_model, out);
        if (wi->parsed())
            return cmd_wiener(wi_config, wi_sets, wi_lambdas, wi_seeds, wi_threads, wi_out, out);
        if (st->parsed()) return cmd_stats(st_in, st_per_graph, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const RuntimeFailure& e) {
        err << "failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return 3;
    }
    err << "no command given\n";
    return 1;
}

}  // namespace graphseq
