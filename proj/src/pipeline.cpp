#include "graphseq/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "graphseq/codec.hpp"
#include "graphseq/dfs.hpp"
#include "graphseq/error.hpp"
#include "graphseq/invariance.hpp"
#include "graphseq/rng.hpp"

namespace graphseq {

namespace {

DatasetItem make_item(const ExperimentConfig& cfg, long long id, Graph g,
                      const Vocabulary& vocab) {
    DatasetItem item;
    item.graph_id = id;
    item.ordering = sample_ordering(g, std::nullopt,
                                    derive_seed(cfg.seed, stream_tag("serialize"),
                                                static_cast<std::uint64_t>(id)));
    TokenSequence ts = encode(g, item.ordering);
    item.ids = tokenize(ts, vocab);
    item.canonical = canonical_string(ts);
    item.target = wiener_index(g);
    item.graph = std::move(g);
    return item;
}

void finish_dataset(const ExperimentConfig& cfg, WienerDataset& data) {
    if (cfg.normalize_targets && !data.train.empty()) {
        double mean = 0.0;
        for (const auto& it : data.train) mean += static_cast<double>(it.target);
        mean /= data.train.size();
        double var = 0.0;
        for (const auto& it : data.train) {
            const double d = static_cast<double>(it.target) - mean;
            var += d * d;
        }
        var /= data.train.size();
        data.target_mean = mean;
        data.target_std = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
}

}  // namespace

WienerDataset build_wiener_dataset(const ExperimentConfig& cfg) {
    cfg.validate();
    WienerDataset data;
    data.vocab = Vocabulary::anonymized();
    const int total = cfg.train_size + cfg.test_size;
    std::set<std::vector<Edge>> seen;  // train/test disjoint as labeled edge sets
    std::uint64_t attempt = 0;
    long long id = 0;
    while (id < total) {
        Graph g = cfg.extra_edges > 0
                      ? random_connected_graph(cfg.n, cfg.extra_edges,
                                               derive_seed(cfg.seed, stream_tag("graph"), attempt))
                      : random_tree(cfg.n, derive_seed(cfg.seed, stream_tag("graph"), attempt));
        ++attempt;
        if (attempt > 100ull * total + 1000ull)
            throw ValidationError("build_wiener_dataset: cannot draw enough distinct graphs");
        if (!seen.insert(g.edges()).second) continue;
        auto item = make_item(cfg, id, std::move(g), data.vocab);
        if (id < cfg.train_size) data.train.push_back(std::move(item));
        else data.test.push_back(std::move(item));
        ++id;
    }
    finish_dataset(cfg, data);
    return data;
}

WienerDataset dataset_from_graphs(const ExperimentConfig& cfg,
                                  const std::vector<GraphRecord>& graphs) {
    cfg.validate();
    const int total = cfg.train_size + cfg.test_size;
    if (static_cast<int>(graphs.size()) < total)
        throw ValidationError("dataset_from_graphs: need " + std::to_string(total) +
                              " graphs, got " + std::to_string(graphs.size()));
    WienerDataset data;
    data.vocab = Vocabulary::anonymized();
    for (int i = 0; i < total; ++i) {
        if (!is_connected(graphs[i].graph))
            throw ValidationError("dataset_from_graphs: graph " +
                                  std::to_string(graphs[i].id) + " is not connected");
        auto item = make_item(cfg, graphs[i].id, graphs[i].graph, data.vocab);
        if (i < cfg.train_size) data.train.push_back(std::move(item));
        else data.test.push_back(std::move(item));
    }
    finish_dataset(cfg, data);
    return data;
}

PrecomputeSummary precompute_trajectories(const std::vector<GraphRecord>& graphs, int count,
                                          std::uint64_t seed,
                                          std::vector<TrajectoryRecord>& out) {
    PrecomputeSummary summary;
    for (const auto& rec : graphs) {
        const std::uint64_t gseed =
            derive_seed(seed, stream_tag("trajectories"), static_cast<std::uint64_t>(rec.id));
        try {
            if (!is_connected(rec.graph))
                throw ValidationError("graph is not connected");
            if (needs_delimited_symbols(rec.graph))
                throw ValidationError(
                    "graph needs delimited symbols, which conflict with the trajectory "
                    "file format");
            auto ords = trajectory_set(rec.graph, count, gseed);
            TrajectoryRecord trec;
            trec.graph_id = rec.id;
            Ordering designated = sample_ordering(
                rec.graph, std::nullopt,
                derive_seed(seed, stream_tag("canonical"), static_cast<std::uint64_t>(rec.id)));
            trec.canonical_sequence = canonical_string(encode(rec.graph, designated));
            for (const auto& ord : ords)
                trec.trajectories.push_back(canonical_string(encode(rec.graph, ord)));
            validate_record(rec.graph, trec);
            out.push_back(std::move(trec));
            ++summary.generated;
        } catch (const ValidationError& e) {
            ++summary.skipped;
            summary.skipped_reasons.emplace_back(rec.id, e.what());
        }
    }
    return summary;
}

FilterStats filter_records(std::vector<TrajectoryRecord>& records, int min_trajectories) {
    FilterStats stats;
    std::vector<TrajectoryRecord> kept;
    for (auto& rec : records) {
        std::set<std::string> distinct(rec.trajectories.begin(), rec.trajectories.end());
        if (static_cast<int>(distinct.size()) >= min_trajectories) {
            kept.push_back(std::move(rec));
            ++stats.kept;
        } else {
            ++stats.dropped;
        }
    }
    records = std::move(kept);
    return stats;
}

std::pair<std::vector<int>, std::vector<int>> sample_olr_pair_from_record(
    const TrajectoryRecord& rec, const Vocabulary& vocab, std::uint64_t seed) {
    if (rec.trajectories.size() < 2)
        throw ValidationError("sample_olr_pair: record has fewer than 2 trajectories");
    Rng rng(seed);
    const std::size_t n = rec.trajectories.size();
    std::size_t i = rng.uniform_int(n);
    std::size_t j = rng.uniform_int(n - 1);
    if (j >= i) ++j;
    auto ids = [&](const std::string& s) {
        return tokenize(parse_canonical_string(s), vocab);
    };
    return {ids(rec.trajectories[i]), ids(rec.trajectories[j])};
}

std::pair<std::vector<int>, std::vector<int>> sample_olr_pair_from_graph(
    const Graph& g, const Vocabulary& vocab, std::uint64_t seed, int max_retries) {
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        const std::uint64_t s = derive_seed(seed, stream_tag("subgraph"), attempt);
        try {
            InducedSubgraphSample sub = sample_dfs_induced_subgraph(g, s);
            TrajectoryPair pair = common_end_pair_any(sub.subgraph,
                                                      derive_seed(s, stream_tag("pair")));
            return {tokenize(encode(sub.subgraph, pair.first), vocab),
                    tokenize(encode(sub.subgraph, pair.second), vocab)};
        } catch (const ValidationError&) {
            // subgraph too small or no heuristic pair; resample
        }
    }
    throw ValidationError("sample_olr_pair: retries exhausted");
}

namespace {

double denormalized(const RecurrentModel& m, double raw) {
    return raw * m.target_std + m.target_mean;
}

double train_rounded_accuracy(const RecurrentModel& m, const std::vector<DatasetItem>& items) {
    if (items.empty()) return 0.0;
    int hits = 0;
    for (const auto& it : items) {
        ForwardTrace tr = forward(m, it.ids);
        const double pred = denormalized(m, regression_output(m, tr));
        if (std::llround(pred) == it.target) ++hits;
    }
    return static_cast<double>(hits) / items.size();
}

std::string format_epoch_line(const EpochStats& s) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch=%d task_loss=%.6g olr_loss=%.6g train_acc=%.6g",
                  s.epoch, s.task_loss, s.olr_loss, s.train_acc);
    return buf;
}

}  // namespace

TrainResult train(const ExperimentConfig& cfg, const WienerDataset& data,
                  const std::vector<TrajectoryRecord>* trajectories, std::ostream* log) {
    cfg.validate();
    if (data.train.empty()) throw ValidationError("train: empty training set");

    TrainResult result;
    result.model = make_model(cfg.cell, cfg.sigma_h, cfg.task, cfg.hidden_width,
                              cfg.embed_width, data.vocab,
                              derive_seed(cfg.seed, stream_tag("init")), cfg.num_layers);
    RecurrentModel& model = result.model;
    model.target_mean = data.target_mean;
    model.target_std = data.target_std;

    // records usable for OLR pairs, keyed by graph id
    std::map<long long, const TrajectoryRecord*> pair_records;
    if (trajectories)
        for (const auto& rec : *trajectories)
            if (static_cast<int>(rec.trajectories.size()) >= 2)
                pair_records[rec.graph_id] = &rec;

    const int n_train = static_cast<int>(data.train.size());
    std::vector<double> grad(model.theta.size(), 0.0);
    std::vector<int> order(n_train);
    for (int i = 0; i < n_train; ++i) order[i] = i;

    double best_loss = std::numeric_limits<double>::infinity();
    int epochs_since_improvement = 0;
    double lr = cfg.learning_rate;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, stream_tag("order"), epoch));
        shuffle_rng.shuffle(order);
        double task_sum = 0.0, olr_sum = 0.0;
        int olr_terms = 0;
        for (int pos = 0; pos < n_train; ++pos) {
            const DatasetItem& item = data.train[order[pos]];
            std::fill(grad.begin(), grad.end(), 0.0);
            if (cfg.task == TaskKind::wiener_regression) {
                const double target =
                    (static_cast<double>(item.target) - model.target_mean) / model.target_std;
                task_sum += add_regression_gradient(model, item.ids, target, 1.0, grad);
            } else {
                task_sum += add_lm_gradient(model, item.ids, 1.0, grad);
            }
            if (cfg.lambda > 0.0) {
                const std::uint64_t pair_seed =
                    derive_seed(cfg.seed, stream_tag("olr"),
                                static_cast<std::uint64_t>(epoch) * n_train + pos);
                std::optional<std::pair<std::vector<int>, std::vector<int>>> pair;
                if (cfg.olr_pair_source == OlrPairSource::full_graph) {
                    auto it = pair_records.find(item.graph_id);
                    if (it != pair_records.end())
                        pair = sample_olr_pair_from_record(*it->second, data.vocab, pair_seed);
                } else {
                    try {
                        pair = sample_olr_pair_from_graph(item.graph, data.vocab, pair_seed);
                    } catch (const ValidationError&) {
                        // no pair for this item this epoch
                    }
                }
                if (pair) {
                    olr_sum += add_olr_gradient(model, pair->first, pair->second,
                                                cfg.olr_mode, cfg.lambda, grad);
                    ++olr_terms;
                }
            }
            sgd_step(model, grad, lr, cfg.clip_norm);
        }
        lr *= cfg.lr_decay;

        EpochStats stats;
        stats.epoch = epoch;
        stats.task_loss = task_sum / n_train;
        stats.olr_loss = olr_terms ? olr_sum / olr_terms : 0.0;
        stats.train_acc = cfg.task == TaskKind::wiener_regression
                              ? train_rounded_accuracy(model, data.train)
                              : 0.0;
        result.log.push_back(stats);
        if (log) *log << format_epoch_line(stats) << '\n';
        if (!std::isfinite(stats.task_loss))
            throw RuntimeFailure("train: loss diverged at epoch " + std::to_string(epoch));

        result.epochs_run = epoch + 1;
        if (stats.train_acc == 1.0) result.reached_perfect_train_acc = true;
        // an epoch counts as progress only when it beats the best loss by a
        // relative margin; SGD noise alone should not reset the plateau clock
        if (stats.task_loss < best_loss * (1.0 - 1e-3)) {
            best_loss = stats.task_loss;
            epochs_since_improvement = 0;
        } else {
            ++epochs_since_improvement;
        }
        const bool acc_ok =
            cfg.task != TaskKind::wiener_regression || stats.train_acc == 1.0;
        if (acc_ok && epochs_since_improvement >= cfg.plateau_window) break;
    }
    return result;
}

RegressionMetrics evaluate_regression(const RecurrentModel& m,
                                      const std::vector<DatasetItem>& test) {
    if (test.empty()) throw ValidationError("evaluate_regression: empty test set");
    RegressionMetrics metrics;
    double abs_sum = 0.0;
    int hits = 0;
    for (const auto& it : test) {
        ForwardTrace tr = forward(m, it.ids);
        const double pred = denormalized(m, regression_output(m, tr));
        metrics.predictions.push_back(pred);
        abs_sum += std::abs(pred - static_cast<double>(it.target));
        if (std::llround(pred) == it.target) ++hits;
    }
    metrics.mae = abs_sum / test.size();
    metrics.rounded_accuracy = static_cast<double>(hits) / test.size();
    return metrics;
}

GenerationMetrics compute_generation_metrics(const std::vector<std::string>& samples,
                                             const std::set<std::string>& reference,
                                             const std::vector<int>& k_values) {
    for (int k : k_values)
        if (k < 1 || k > static_cast<int>(samples.size()))
            throw ValidationError("compute_generation_metrics: K=" + std::to_string(k) +
                                  " exceeds the sample count");
    auto parses = [](const std::string& s) {
        try {
            decode(parse_canonical_string(s));
            return true;
        } catch (const ValidationError&) {
            return false;
        }
    };
    GenerationMetrics out;
    out.sample_count = static_cast<int>(samples.size());
    std::vector<char> valid(samples.size(), 0);
    int valid_count = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        valid[i] = parses(samples[i]);
        valid_count += valid[i];
    }
    out.validity = samples.empty() ? 0.0 : static_cast<double>(valid_count) / samples.size();

    std::vector<int> ks = k_values;
    std::sort(ks.begin(), ks.end());
    for (int k : ks) {
        std::set<std::string> distinct;
        for (int i = 0; i < k; ++i)
            if (valid[i]) distinct.insert(samples[i]);
        out.unique_at.emplace_back(k, static_cast<double>(distinct.size()) / k);
    }

    std::set<std::string> all_valid;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (valid[i]) all_valid.insert(samples[i]);
    if (all_valid.empty()) {
        out.novelty = 0.0;  // degenerate-case convention
    } else {
        int novel = 0;
        for (const auto& s : all_valid)
            if (!reference.count(s)) ++novel;
        out.novelty = static_cast<double>(novel) / all_valid.size();
    }
    return out;
}

GenerationMetrics evaluate_generation(const RecurrentModel& m,
                                      const std::set<std::string>& reference,
                                      const std::vector<int>& k_values, int sample_count,
                                      double temperature, int max_len, std::uint64_t seed) {
    if (sample_count < 1) throw ValidationError("evaluate_generation: sample_count must be >= 1");
    std::vector<std::string> samples;
    samples.reserve(sample_count);
    for (int i = 0; i < sample_count; ++i) {
        auto ids = sample_sequence(m, max_len, temperature,
                                   derive_seed(seed, stream_tag("sample"), i));
        samples.push_back(canonical_string(detokenize(ids, m.vocab)));
    }
    return compute_generation_metrics(samples, reference, k_values);
}

std::vector<int> parse_k_values(const std::string& csv) {
    std::vector<int> ks;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) throw ValidationError("bad k_values '" + csv + "'");
        ks.push_back(std::stoi(cur));
        cur.clear();
    };
    for (char c : csv) {
        if (c == ',') flush();
        else if (!std::isspace(static_cast<unsigned char>(c))) cur += c;
    }
    flush();
    return ks;
}

namespace {

struct RunTask {
    int seed_index = 0;
    double lambda = 0.0;
    double mae = 0.0, acc = 0.0;
};

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

}  // namespace

WienerExperimentReport run_wiener_experiment(const ExperimentConfig& base,
                                             const std::vector<double>& lambdas,
                                             int num_seeds, int threads,
                                             std::ostream* progress) {
    if (num_seeds < 1) throw ValidationError("run_wiener_experiment: need at least 1 seed");
    // one dataset and trajectory table per seed, shared across arms
    struct SeedData {
        WienerDataset data;
        std::vector<TrajectoryRecord> records;
    };
    std::vector<SeedData> per_seed(num_seeds);
    for (int s = 0; s < num_seeds; ++s) {
        ExperimentConfig cfg = base;
        cfg.seed = derive_seed(base.seed, stream_tag("paired_seed"), s);
        per_seed[s].data = build_wiener_dataset(cfg);
        if (base.olr_pair_source == OlrPairSource::full_graph) {
            std::vector<GraphRecord> train_graphs;
            for (const auto& item : per_seed[s].data.train)
                train_graphs.push_back({item.graph_id, item.graph});
            precompute_trajectories(train_graphs, cfg.trajectory_count, cfg.seed,
                                    per_seed[s].records);
            filter_records(per_seed[s].records, base.min_trajectories);
        }
    }

    std::vector<RunTask> tasks;
    for (int s = 0; s < num_seeds; ++s) {
        tasks.push_back({s, 0.0, 0, 0});
        for (double l : lambdas) tasks.push_back({s, l, 0, 0});
    }

    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            RunTask& t = tasks[i];
            ExperimentConfig cfg = base;
            cfg.seed = derive_seed(base.seed, stream_tag("paired_seed"), t.seed_index);
            cfg.lambda = t.lambda;
            const SeedData& sd = per_seed[t.seed_index];
            TrainResult tr = train(cfg, sd.data, cfg.lambda > 0.0 ? &sd.records : nullptr,
                                   nullptr);
            RegressionMetrics m = evaluate_regression(tr.model, sd.data.test);
            t.mae = m.mae;
            t.acc = m.rounded_accuracy;
            if (progress) {
                std::lock_guard<std::mutex> lock(io_mutex);
                *progress << "run seed=" << t.seed_index << " lambda=" << t.lambda
                          << " mae=" << m.mae << " acc=" << m.rounded_accuracy
                          << " epochs=" << tr.epochs_run
                          << " train_acc_perfect=" << (tr.reached_perfect_train_acc ? 1 : 0)
                          << '\n'
                          << std::flush;
            }
        }
    };
    const int nthreads = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    WienerExperimentReport report;
    report.vanilla.lambda = 0.0;
    report.olr_arms.resize(lambdas.size());
    for (std::size_t a = 0; a < lambdas.size(); ++a) report.olr_arms[a].lambda = lambdas[a];
    for (const auto& t : tasks) {
        ArmSummary* arm = nullptr;
        if (t.lambda == 0.0) {
            arm = &report.vanilla;
        } else {
            for (auto& a : report.olr_arms)
                if (a.lambda == t.lambda) arm = &a;
        }
        arm->maes.push_back(t.mae);
        arm->accs.push_back(t.acc);
    }
    report.vanilla.mean_mae = mean(report.vanilla.maes);
    report.vanilla.mean_acc = mean(report.vanilla.accs);
    for (auto& a : report.olr_arms) {
        a.mean_mae = mean(a.maes);
        a.mean_acc = mean(a.accs);
        if (report.best_arm < 0 || a.mean_mae < report.olr_arms[report.best_arm].mean_mae)
            report.best_arm = static_cast<int>(&a - report.olr_arms.data());
    }
    if (report.best_arm >= 0 && report.vanilla.mean_mae > 0.0)
        report.relative_mae_improvement =
            (report.vanilla.mean_mae - report.olr_arms[report.best_arm].mean_mae) /
            report.vanilla.mean_mae;
    return report;
}

std::string format_experiment_report(const WienerExperimentReport& report) {
    std::ostringstream out;
    auto arm_line = [&](const char* name, const ArmSummary& a) {
        out << name << " lambda=" << a.lambda << " mean_mae=" << a.mean_mae
            << " mean_acc=" << a.mean_acc << " per_seed_mae=[";
        for (std::size_t i = 0; i < a.maes.size(); ++i) out << (i ? "," : "") << a.maes[i];
        out << "]\n";
    };
    arm_line("vanilla", report.vanilla);
    for (const auto& a : report.olr_arms) arm_line("olr", a);
    if (report.best_arm >= 0) {
        out << "best_lambda=" << report.olr_arms[report.best_arm].lambda
            << " relative_mae_improvement=" << report.relative_mae_improvement << '\n';
    }
    return out.str();
}

}  // namespace graphseq
