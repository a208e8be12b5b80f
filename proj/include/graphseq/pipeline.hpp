#ifndef GRAPHSEQ_PIPELINE_HPP
#define GRAPHSEQ_PIPELINE_HPP

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphseq/config.hpp"
#include "graphseq/graph_io.hpp"
#include "graphseq/recurrent.hpp"
#include "graphseq/trajectory_file.hpp"

namespace graphseq {

struct DatasetItem {
    long long graph_id = 0;
    Graph graph;
    Ordering ordering;       // the serialization used as model input
    std::vector<int> ids;    // tokenized
    long long target = 0;    // wiener index
    std::string canonical;   // canonical string of the serialization
};

struct WienerDataset {
    std::vector<DatasetItem> train, test;
    Vocabulary vocab;
    double target_mean = 0.0;
    double target_std = 1.0;
};

// Random connected graphs (trees when extra_edges == 0), each serialized once
// through a seeded stochastic DFS; targets are Wiener indices. Train and test
// graphs are disjoint as labeled edge sets. Deterministic per seed.
WienerDataset build_wiener_dataset(const ExperimentConfig& cfg);

// Same item construction over user-supplied graphs: first train_size records
// become the train set, the next test_size the test set.
WienerDataset dataset_from_graphs(const ExperimentConfig& cfg,
                                  const std::vector<GraphRecord>& graphs);

struct PrecomputeSummary {
    int generated = 0;
    int skipped = 0;
    std::vector<std::pair<long long, std::string>> skipped_reasons;
};

// Per graph: trajectory_set with `count`, serialized into records (validated
// at write time). Graphs admitting no eligible cut are reported as skipped,
// never silently dropped. Per-graph seeds derive from (seed, graph_id).
PrecomputeSummary precompute_trajectories(const std::vector<GraphRecord>& graphs, int count,
                                          std::uint64_t seed,
                                          std::vector<TrajectoryRecord>& out);

struct FilterStats {
    int kept = 0;
    int dropped = 0;
    double retention() const {
        return kept + dropped == 0 ? 1.0 : static_cast<double>(kept) / (kept + dropped);
    }
};

// Keeps records with at least min_trajectories distinct trajectories.
FilterStats filter_records(std::vector<TrajectoryRecord>& records, int min_trajectories);

// Uniform distinct pair from a record's stored trajectories, in random order.
std::pair<std::vector<int>, std::vector<int>> sample_olr_pair_from_record(
    const TrajectoryRecord& rec, const Vocabulary& vocab, std::uint64_t seed);

// Pair on a DFS-induced subgraph: samples the subgraph, then a common-end
// pair on it, resampling on failure up to max_retries.
std::pair<std::vector<int>, std::vector<int>> sample_olr_pair_from_graph(
    const Graph& g, const Vocabulary& vocab, std::uint64_t seed, int max_retries = 50);

struct EpochStats {
    int epoch = 0;
    double task_loss = 0.0;
    double olr_loss = 0.0;
    double train_acc = 0.0;
};

struct TrainResult {
    RecurrentModel model;
    std::vector<EpochStats> log;
    bool reached_perfect_train_acc = false;
    int epochs_run = 0;
};

// Minimizes task loss + lambda * OLR by per-example SGD in a seeded shuffled
// order, OLR pairs re-drawn per epoch. Stops at the epoch budget, or once
// train rounded accuracy reaches 1.0 and the train loss has not improved for
// plateau_window epochs. Writes `epoch=<e> task_loss=<f> olr_loss=<f>
// train_acc=<f>` lines to log when given. Throws RuntimeFailure on divergence.
TrainResult train(const ExperimentConfig& cfg, const WienerDataset& data,
                  const std::vector<TrajectoryRecord>* trajectories, std::ostream* log);

struct RegressionMetrics {
    double mae = 0.0;
    double rounded_accuracy = 0.0;
    std::vector<double> predictions;  // de-normalized raw outputs, test order
};

RegressionMetrics evaluate_regression(const RecurrentModel& m,
                                      const std::vector<DatasetItem>& test);

struct GenerationMetrics {
    double validity = 0.0;
    std::vector<std::pair<int, double>> unique_at;  // (K, value), K ascending
    double novelty = 0.0;
    int sample_count = 0;
};

// Pure set arithmetic over already-generated canonical strings; a sample is
// valid iff it parses through decode. unique@K counts distinct valid strings
// among the first K samples; novelty is the fraction of distinct valid
// strings absent from the reference set (0 when no sample is valid).
GenerationMetrics compute_generation_metrics(const std::vector<std::string>& samples,
                                             const std::set<std::string>& reference,
                                             const std::vector<int>& k_values);

// Samples sample_count sequences from the model and scores them.
// Throws when any K exceeds sample_count.
GenerationMetrics evaluate_generation(const RecurrentModel& m,
                                      const std::set<std::string>& reference,
                                      const std::vector<int>& k_values, int sample_count,
                                      double temperature, int max_len, std::uint64_t seed);

std::vector<int> parse_k_values(const std::string& csv);

// Paired experiment: one dataset + model init per seed, trained once with
// lambda = 0 and once per OLR lambda; the best OLR arm is picked by mean MAE.
struct ArmSummary {
    double lambda = 0.0;
    std::vector<double> maes, accs;  // per seed
    double mean_mae = 0.0;
    double mean_acc = 0.0;
};

struct WienerExperimentReport {
    ArmSummary vanilla;
    std::vector<ArmSummary> olr_arms;
    int best_arm = -1;
    double relative_mae_improvement = 0.0;  // vs vanilla, for the best arm
};

WienerExperimentReport run_wiener_experiment(const ExperimentConfig& base,
                                             const std::vector<double>& lambdas,
                                             int num_seeds, int threads,
                                             std::ostream* progress = nullptr);

std::string format_experiment_report(const WienerExperimentReport& report);

}  // namespace graphseq

#endif  // GRAPHSEQ_PIPELINE_HPP
