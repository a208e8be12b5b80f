#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "graphseq/cli.hpp"
#include "graphseq/graph_io.hpp"
#include "graphseq/recurrent.hpp"

using namespace graphseq;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("graphseq_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli_run(args, out, err);
    return {code, out.str(), err.str()};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    f << content;
}

const char* kTinyConfig =
    "n=6\n"
    "train_size=8\n"
    "test_size=6\n"
    "hidden_width=12\n"
    "embed_width=6\n"
    "epochs=25\n"
    "learning_rate=0.2\n"
    "lambda=0\n"
    "seed=5\n";

}  // namespace

TEST_CASE("cli: gen-graphs is deterministic and validates flags") {
    Scratch s;
    auto r1 = run({"gen-graphs", "--n", "8", "--count", "5", "--seed", "3", "--out",
                   s.path("a.g")});
    CHECK(r1.code == 0);
    auto r2 = run({"gen-graphs", "--n", "8", "--count", "5", "--seed", "3", "--out",
                   s.path("b.g")});
    CHECK(r2.code == 0);
    CHECK(slurp(s.path("a.g")) == slurp(s.path("b.g")));
    CHECK(read_graph_file(s.path("a.g")).size() == 5);

    auto missing = run({"gen-graphs", "--n", "8"});
    CHECK(missing.code == 1);
    auto unknown = run({"no-such-command"});
    CHECK(unknown.code == 1);
}

TEST_CASE("cli: trajectories writes records and reports skips") {
    Scratch s;
    // the six-node example graph plus a path graph (which admits no pair)
    write_file(s.path("in.g"),
               "g 0 6 0-1,0-2,0-3,1-4,1-5,4-5 L A,B,C,D,E,F\n"
               "g 1 4 0-1,1-2,2-3\n");
    auto r = run({"trajectories", "--in", s.path("in.g"), "--out", s.path("t.rec"),
                  "--count", "10", "--seed", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("generated=1 skipped=1") != std::string::npos);
    CHECK(r.out.find("graph admits no heuristic pair") != std::string::npos);

    auto rerun = run({"trajectories", "--in", s.path("in.g"), "--out", s.path("t2.rec"),
                      "--count", "10", "--seed", "2"});
    CHECK(rerun.code == 0);
    CHECK(slurp(s.path("t.rec")) == slurp(s.path("t2.rec")));

    write_file(s.path("bad.g"), "g 0 6 0-1,0-2\ng 1 4 0-1-2\n");
    auto bad = run({"trajectories", "--in", s.path("bad.g"), "--out", s.path("x.rec")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("2") != std::string::npos);  // line number in the message

    auto unreadable = run({"trajectories", "--in", s.path("missing.g"), "--out",
                           s.path("x.rec")});
    CHECK(unreadable.code == 2);
}

TEST_CASE("cli: filter") {
    Scratch s;
    write_file(s.path("in.g"), "g 0 6 0-1,0-2,0-3,1-4,1-5,4-5 L A,B,C,D,E,F\n");
    REQUIRE(run({"trajectories", "--in", s.path("in.g"), "--out", s.path("t.rec"),
                 "--count", "10", "--seed", "4"})
                .code == 0);
    auto keep = run({"filter", "--in", s.path("t.rec"), "--out", s.path("kept.rec"),
                     "--min", "1"});
    CHECK(keep.code == 0);
    CHECK(keep.out.find("dropped=0") != std::string::npos);
    auto drop = run({"filter", "--in", s.path("t.rec"), "--out", s.path("none.rec"),
                     "--min", "50"});
    CHECK(drop.code == 0);
    CHECK(drop.out.find("kept=0") != std::string::npos);
    CHECK(slurp(s.path("none.rec")).empty());
}

TEST_CASE("cli: train writes a reproducible checkpoint and an echoed log") {
    Scratch s;
    write_file(s.path("cfg"), kTinyConfig);
    auto r1 = run({"train", "--config", s.path("cfg"), "--out-model", s.path("m1"),
                   "--log", s.path("log1")});
    REQUIRE(r1.code == 0);
    auto r2 = run({"train", "--config", s.path("cfg"), "--out-model", s.path("m2"),
                   "--log", s.path("log2")});
    REQUIRE(r2.code == 0);
    CHECK(slurp(s.path("m1")) == slurp(s.path("m2")));  // identical checkpoint bytes
    CHECK(slurp(s.path("log1")) == slurp(s.path("log2")));

    std::string log = slurp(s.path("log1"));
    CHECK(log.find("# n=6") != std::string::npos);  // resolved config is echoed
    CHECK(log.find("epoch=0 task_loss=") != std::string::npos);

    // flags override the config file
    auto r3 = run({"train", "--config", s.path("cfg"), "--out-model", s.path("m3"),
                   "--set", "epochs=3", "--set", "lambda=0.5"});
    CHECK(r3.code == 0);
    CHECK(r3.out.find("epochs=3") != std::string::npos);

    auto bad = run({"train", "--config", s.path("cfg"), "--out-model", s.path("m4"),
                    "--set", "no_such=1"});
    CHECK(bad.code == 2);
}

TEST_CASE("cli: train reports divergence as a runtime failure") {
    Scratch s;
    write_file(s.path("cfg"), kTinyConfig);
    auto r = run({"train", "--config", s.path("cfg"), "--out-model", s.path("m"),
                  "--set", "learning_rate=1e18", "--set", "clip_norm=0", "--set",
                  "epochs=5"});
    CHECK(r.code == 3);
    // either the per-step non-finite guard or the epoch-level loss check fires
    bool diagnosed = r.err.find("non-finite gradient") != std::string::npos ||
                     r.err.find("diverged") != std::string::npos;
    CHECK(diagnosed);
}

TEST_CASE("cli: wiener runs a miniature paired sweep") {
    Scratch s;
    write_file(s.path("cfg"), kTinyConfig);
    auto r = run({"wiener", "--config", s.path("cfg"), "--lambdas", "1", "--num-seeds", "1",
                  "--threads", "2", "--set", "epochs=5", "--set", "test_size=4", "--out",
                  s.path("report")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("vanilla lambda=0") != std::string::npos);
    CHECK(r.out.find("olr lambda=1") != std::string::npos);
    CHECK(r.out.find("best_lambda=1") != std::string::npos);
    std::string report = slurp(s.path("report"));
    CHECK(report.find("# n=6") != std::string::npos);  // config echoed
    CHECK(report.find("relative_mae_improvement=") != std::string::npos);
}

TEST_CASE("cli: eval prints metrics, writes them, and dumps predictions") {
    Scratch s;
    write_file(s.path("cfg"), kTinyConfig);
    REQUIRE(run({"train", "--config", s.path("cfg"), "--out-model", s.path("model")})
                .code == 0);
    REQUIRE(run({"gen-graphs", "--n", "6", "--count", "10", "--seed", "9", "--out",
                 s.path("test.g")})
                .code == 0);

    auto r = run({"eval", "--model", s.path("model"), "--data", s.path("test.g"),
                  "--metrics-out", s.path("metrics"), "--dump-predictions",
                  s.path("preds")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("mae=") != std::string::npos);
    CHECK(r.out.find("rounded_accuracy=") != std::string::npos);

    // the metrics file re-parses to exactly the printed values
    std::istringstream metrics(slurp(s.path("metrics")));
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(metrics, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    CHECK(r.out.find("mae=" + kv["mae"]) != std::string::npos);
    CHECK(r.out.find("rounded_accuracy=" + kv["rounded_accuracy"]) != std::string::npos);

    // recompute the metrics from the dumped raw predictions
    std::istringstream preds(slurp(s.path("preds")));
    double abs_sum = 0.0;
    int rows = 0, hits = 0;
    long long id;
    double pred, target;
    while (preds >> id >> pred >> target) {
        abs_sum += std::abs(pred - target);
        hits += std::llround(pred) == static_cast<long long>(target);
        ++rows;
    }
    REQUIRE(rows == 10);
    CHECK(std::abs(abs_sum / rows - std::stod(kv["mae"])) < 1e-6);
    CHECK(std::abs(static_cast<double>(hits) / rows - std::stod(kv["rounded_accuracy"])) <
          1e-9);

    // empty data file is a data error
    write_file(s.path("empty.g"), "");
    CHECK(run({"eval", "--model", s.path("model"), "--data", s.path("empty.g")}).code == 2);
}

TEST_CASE("cli: eval rejects a vocabulary mismatch") {
    Scratch s;
    // a labeled-vocabulary model cannot evaluate anonymized synthetic data
    RecurrentModel m = make_model(CellKind::lstm, Nonlinearity::tanh_fn,
                                  TaskKind::wiener_regression, 4, 3,
                                  Vocabulary::labeled({"C", "O"}), 1);
    save_model(s.path("labeled_model"), m);
    REQUIRE(run({"gen-graphs", "--n", "5", "--count", "3", "--seed", "1", "--out",
                 s.path("d.g")})
                .code == 0);
    auto r = run({"eval", "--model", s.path("labeled_model"), "--data", s.path("d.g")});
    CHECK(r.code == 2);
    CHECK(r.err.find("vocabulary mismatch") != std::string::npos);
}

TEST_CASE("cli: generate emits deterministic sequences") {
    Scratch s;
    write_file(s.path("cfg"), kTinyConfig);
    REQUIRE(run({"train", "--config", s.path("cfg"), "--set", "task=tree_lm", "--set",
                 "epochs=10", "--out-model", s.path("lm")})
                .code == 0);
    auto r1 = run({"generate", "--model", s.path("lm"), "--count", "5", "--seed", "3",
                   "--max-len", "30"});
    auto r2 = run({"generate", "--model", s.path("lm"), "--count", "5", "--seed", "3",
                   "--max-len", "30"});
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);
}

TEST_CASE("cli: oracle modes") {
    Scratch s;
    write_file(s.path("p.g"), "g 0 3 0-1,1-2\n");
    auto en = run({"oracle", "--in", s.path("p.g"), "--mode", "enumerate"});
    CHECK(en.code == 0);
    CHECK(en.out.find("orderings=4") != std::string::npos);
    CHECK(en.out.find("0,1,2") != std::string::npos);

    auto end1 = run({"oracle", "--in", s.path("p.g"), "--mode", "end-at", "--vertex", "1"});
    CHECK(end1.code == 0);
    CHECK(end1.out.find("orderings=0") != std::string::npos);

    // a 12-node graph exceeds the default oracle bound
    REQUIRE(run({"gen-graphs", "--n", "12", "--count", "1", "--seed", "1", "--out",
                 s.path("big.g")})
                .code == 0);
    auto big = run({"oracle", "--in", s.path("big.g"), "--mode", "enumerate"});
    CHECK(big.code == 2);
    CHECK(big.err.find("oracle bound 8") != std::string::npos);

    auto badmode = run({"oracle", "--in", s.path("p.g"), "--mode", "nope"});
    CHECK(badmode.code == 2);
}

TEST_CASE("cli: stats reports connectivity classes") {
    Scratch s;
    write_file(s.path("mix.g"),
               "g 0 3 0-1,1-2\n"        // one-edge-connected
               "g 1 4 0-1,1-2,2-3,0-3\n"  // two-edge-connected
               "g 2 4 0-1,0-2,0-3,1-2,1-3,2-3\n"  // higher
               "g 3 2\n");              // disconnected
    auto r = run({"stats", "--in", s.path("mix.g"), "--per-graph"});
    CHECK(r.code == 0);
    CHECK(r.out.find("graphs=4 connected=3 one_edge_connected=1 two_edge_connected=1 "
                     "higher=1") != std::string::npos);
    CHECK(r.out.find("fraction_one_edge_connected=0.25") != std::string::npos);
    CHECK(r.out.find("class=disconnected") != std::string::npos);
    CHECK(r.out.find("wiener=4") != std::string::npos);
}
