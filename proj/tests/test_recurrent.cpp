#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "gradcheck.hpp"
#include "graphseq/error.hpp"
#include "graphseq/invariance.hpp"
#include "graphseq/recurrent.hpp"
#include "graphseq/rng.hpp"

using namespace graphseq;
using gradcheck::LossKind;

namespace {

RecurrentModel small_model(CellKind cell, TaskKind task, std::uint64_t seed,
                           int hidden = 8, int embed = 5) {
    return make_model(cell, Nonlinearity::tanh_fn, task, hidden, embed,
                      Vocabulary::anonymized(), seed);
}

RecurrentModel zero_model(CellKind cell, TaskKind task = TaskKind::wiener_regression,
                          int hidden = 4, int embed = 3) {
    RecurrentModel m = small_model(cell, task, 1, hidden, embed);
    std::fill(m.theta.begin(), m.theta.end(), 0.0);
    return m;
}

std::vector<int> random_ids(Rng& rng, int len, int vocab_size) {
    std::vector<int> ids(len);
    for (int& id : ids) id = rng.uniform_index(vocab_size);
    return ids;
}

double gradient_check(const RecurrentModel& m, LossKind kind, const std::vector<int>& a,
                      const std::vector<int>& b, double target) {
    return gradcheck::max_relative_error(m, kind, a, b, target);
}

}  // namespace

TEST_CASE("forward: zero parameters propagate zero hidden states") {
    RecurrentModel m = zero_model(CellKind::vanilla);
    auto tr = forward(m, {0, 4, 4, 1});
    for (const auto& layer : tr.h)
        for (double h : layer) CHECK(h == 0.0);
    CHECK(regression_output(m, tr) == 0.0);
}

TEST_CASE("forward: length-1 input runs exactly one step") {
    RecurrentModel m = small_model(CellKind::lstm, TaskKind::wiener_regression, 3);
    auto tr = forward(m, {4});
    CHECK(tr.steps == 1);
    CHECK(tr.h[0].size() == static_cast<std::size_t>(2 * m.hidden));
    CHECK_THROWS_AS(forward(m, {}), ValidationError);
    CHECK_THROWS_AS(forward(m, {99}), ValidationError);
}

TEST_CASE("forward is deterministic") {
    for (CellKind cell : {CellKind::vanilla, CellKind::lstm}) {
        RecurrentModel m = small_model(cell, TaskKind::wiener_regression, 7);
        auto t1 = forward(m, {0, 4, 2, 4, 3, 1});
        auto t2 = forward(m, {0, 4, 2, 4, 3, 1});
        CHECK(t1.h == t2.h);
        CHECK(t1.c == t2.c);
        CHECK(regression_output(m, t1) == regression_output(m, t2));
    }
}

TEST_CASE("olr_loss: zero on identical inputs, symmetric") {
    RecurrentModel m = small_model(CellKind::lstm, TaskKind::wiener_regression, 11);
    std::vector<int> a{0, 4, 2, 4, 3, 1}, b{0, 4, 4, 1};
    CHECK(olr_loss(m, a, a) == 0.0);
    CHECK(olr_loss(m, a, a, OlrTarget::hidden) == 0.0);
    CHECK(olr_loss(m, a, b) == olr_loss(m, b, a));
    CHECK(olr_loss(m, a, b) >= 0.0);
}

TEST_CASE("olr_loss on a hand-built one-unit linear model") {
    // identity hidden nonlinearity, all weights zero except the input-to-output
    // map: the final output is the last token's embedding value
    RecurrentModel m = make_model(CellKind::vanilla, Nonlinearity::identity_fn,
                                  TaskKind::wiener_regression, 1, 1,
                                  Vocabulary::anonymized(), 0);
    std::fill(m.theta.begin(), m.theta.end(), 0.0);
    m.theta[m.off_embedding + 0] = 2.0;  // token id 0
    m.theta[m.off_embedding + 1] = 5.0;  // token id 1
    m.theta[m.off_reg_d] = 1.0;
    CHECK(task_loss_regression(m, {0}, 0.0) == 4.0);
    CHECK(task_loss_regression(m, {1}, 0.0) == 25.0);
    CHECK(olr_loss(m, {0}, {1}) == doctest::Approx(9.0));  // (5-2)^2
}

TEST_CASE("task_loss_regression basics") {
    RecurrentModel m = zero_model(CellKind::vanilla);
    CHECK(task_loss_regression(m, {0, 1}, 0.0) == 0.0);
    CHECK(task_loss_regression(m, {0, 1}, 4.0) == 16.0);
    // batch mean over targets {1, 3} with output 0
    double mean = (task_loss_regression(m, {0, 1}, 1.0) +
                   task_loss_regression(m, {0, 1}, 3.0)) / 2.0;
    CHECK(mean == 5.0);
}

TEST_CASE("task_loss_lm basics") {
    RecurrentModel m = zero_model(CellKind::lstm, TaskKind::tree_lm);
    const double lnV = std::log(static_cast<double>(m.vocab_size()));
    // uniform logits give ln V per step
    CHECK(task_loss_lm(m, {0, 1}) == doctest::Approx(lnV));
    CHECK(task_loss_lm(m, {0, 4, 4, 1}) == doctest::Approx(lnV));
    CHECK_THROWS_AS(task_loss_lm(m, {0}), ValidationError);
    // a model putting almost all mass on the correct next token
    RecurrentModel sharp = zero_model(CellKind::lstm, TaskKind::tree_lm);
    sharp.theta[sharp.off_lm_b + Vocabulary::kEos] = 60.0;
    CHECK(task_loss_lm(sharp, {0, 1}) < 1e-12);
}

TEST_CASE("analytic BPTT gradients match central finite differences") {
    // both cell kinds, both heads, both OLR targets, several random configs
    Rng rng(stream_tag("gradcheck"));
    int configs = 0;
    for (CellKind cell : {CellKind::vanilla, CellKind::lstm}) {
        for (LossKind kind : {LossKind::regression, LossKind::lm, LossKind::olr_output,
                              LossKind::olr_hidden}) {
            for (int rep = 0; rep < 3; ++rep) {
                TaskKind task = (kind == LossKind::lm || (kind == LossKind::olr_output && rep == 2))
                                    ? TaskKind::tree_lm
                                    : TaskKind::wiener_regression;
                RecurrentModel m = small_model(cell, task, rng.next());
                auto a = random_ids(rng, 5 + rep, m.vocab_size());
                auto b = random_ids(rng, 4 + rep, m.vocab_size());
                double target = rng.uniform_real(-2.0, 2.0);
                double err = gradient_check(m, kind, a, b, target);
                INFO("cell=", to_string(cell), " kind=", static_cast<int>(kind), " rep=", rep);
                CHECK(err < 1e-4);
                ++configs;
            }
        }
    }
    CHECK(configs >= 20);
}

TEST_CASE("gradients stay exact for stacked cells") {
    Rng rng(stream_tag("gradcheck_deep"));
    for (CellKind cell : {CellKind::vanilla, CellKind::lstm}) {
        for (LossKind kind : {LossKind::regression, LossKind::lm, LossKind::olr_output}) {
            TaskKind task =
                kind == LossKind::lm ? TaskKind::tree_lm : TaskKind::wiener_regression;
            RecurrentModel m = make_model(cell, Nonlinearity::tanh_fn, task, 6, 4,
                                          Vocabulary::anonymized(), rng.next(), 3);
            CHECK(m.layers == 3);
            auto a = random_ids(rng, 6, m.vocab_size());
            auto b = random_ids(rng, 5, m.vocab_size());
            double err = gradient_check(m, kind, a, b, rng.uniform_real(-2.0, 2.0));
            INFO("cell=", to_string(cell), " kind=", static_cast<int>(kind));
            CHECK(err < 1e-4);
        }
    }
    // stacked checkpoint round trip
    RecurrentModel deep = make_model(CellKind::lstm, Nonlinearity::tanh_fn,
                                     TaskKind::tree_lm, 5, 3, Vocabulary::anonymized(), 2, 2);
    std::stringstream buf;
    save_model(buf, deep);
    RecurrentModel back = load_model(buf);
    CHECK(back.layers == 2);
    CHECK(back.theta == deep.theta);
    // sampling runs through the stack
    CHECK(sample_sequence(deep, 12, 1.0, 4) == sample_sequence(deep, 12, 1.0, 4));
}

TEST_CASE("gradient additivity: task + lambda * OLR") {
    RecurrentModel m = small_model(CellKind::lstm, TaskKind::wiener_regression, 21);
    std::vector<int> a{0, 4, 2, 4, 3, 1}, b{0, 4, 4, 3, 1};
    const double lambda = 2.5;

    std::vector<double> combined(m.theta.size(), 0.0);
    add_regression_gradient(m, a, 1.0, 1.0, combined);
    add_olr_gradient(m, a, b, OlrTarget::output, lambda, combined);

    std::vector<double> task_only(m.theta.size(), 0.0), olr_only(m.theta.size(), 0.0);
    add_regression_gradient(m, a, 1.0, 1.0, task_only);
    add_olr_gradient(m, a, b, OlrTarget::output, 1.0, olr_only);

    for (std::size_t i = 0; i < combined.size(); ++i)
        CHECK(combined[i] == doctest::Approx(task_only[i] + lambda * olr_only[i])
                                 .epsilon(1e-12));

    // zero lambda reduces to the task-only gradient
    std::vector<double> zero_l(m.theta.size(), 0.0);
    add_regression_gradient(m, a, 1.0, 1.0, zero_l);
    add_olr_gradient(m, a, b, OlrTarget::output, 0.0, zero_l);
    for (std::size_t i = 0; i < zero_l.size(); ++i)
        CHECK(zero_l[i] == doctest::Approx(task_only[i]).epsilon(1e-12));

    // identical pair contributes zero gradient
    std::vector<double> same(m.theta.size(), 0.0);
    double l = add_olr_gradient(m, a, a, OlrTarget::output, 1.0, same);
    CHECK(l == 0.0);
    for (double gi : same) CHECK(gi == 0.0);
}

TEST_CASE("sgd_step") {
    RecurrentModel m = small_model(CellKind::vanilla, TaskKind::wiener_regression, 5);
    RecurrentModel before = m;
    std::vector<double> zero(m.theta.size(), 0.0);
    sgd_step(m, zero, 0.1, 1.0);
    CHECK(m.theta == before.theta);

    // clipped update has norm learning_rate * clip_norm
    std::vector<double> grad(m.theta.size(), 0.0);
    grad[0] = 30.0;
    grad[1] = 40.0;  // norm 50 > clip 1
    sgd_step(m, grad, 0.5, 1.0);
    double delta = 0.0;
    for (std::size_t i = 0; i < m.theta.size(); ++i) {
        const double d = m.theta[i] - before.theta[i];
        delta += d * d;
    }
    CHECK(std::sqrt(delta) == doctest::Approx(0.5 * 1.0).epsilon(1e-12));

    // determinism
    RecurrentModel m2 = before;
    sgd_step(m2, grad, 0.5, 1.0);
    CHECK(m.theta == m2.theta);

    std::vector<double> bad(m.theta.size(), 0.0);
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sgd_step(m, bad, 0.1, 1.0), RuntimeFailure);
}

TEST_CASE("sample_sequence") {
    RecurrentModel eos_model = zero_model(CellKind::lstm, TaskKind::tree_lm);
    eos_model.theta[eos_model.off_lm_b + Vocabulary::kEos] = 50.0;
    CHECK(sample_sequence(eos_model, 10, 1.0, 3) ==
          std::vector<int>{Vocabulary::kBos, Vocabulary::kEos});
    // temperature 0 decodes greedily
    CHECK(sample_sequence(eos_model, 10, 0.0, 9) ==
          std::vector<int>{Vocabulary::kBos, Vocabulary::kEos});

    RecurrentModel v_model = zero_model(CellKind::lstm, TaskKind::tree_lm);
    v_model.theta[v_model.off_lm_b + Vocabulary::kFirstSymbol] = 50.0;
    auto ids = sample_sequence(v_model, 7, 0.0, 1);
    CHECK(ids.size() == 8u);  // BOS plus max_len tokens, EOS never sampled
    CHECK_THROWS_AS(sample_sequence(v_model, 0, 1.0, 1), ValidationError);

    RecurrentModel m = small_model(CellKind::lstm, TaskKind::tree_lm, 33);
    for (std::uint64_t s = 0; s < 20; ++s)
        CHECK(sample_sequence(m, 24, 1.0, s) == sample_sequence(m, 24, 1.0, s));
}

TEST_CASE("checkpoint round trip is bit exact") {
    for (CellKind cell : {CellKind::vanilla, CellKind::lstm}) {
        RecurrentModel m = small_model(cell, TaskKind::wiener_regression, 17);
        m.target_mean = 123.0 / 7.0;
        m.target_std = std::sqrt(2.0);
        std::stringstream buf;
        save_model(buf, m);
        RecurrentModel back = load_model(buf);
        CHECK(back.theta == m.theta);
        CHECK(back.cell == m.cell);
        CHECK(back.hidden == m.hidden);
        CHECK(back.embed == m.embed);
        CHECK(back.task == m.task);
        CHECK(back.target_mean == m.target_mean);
        CHECK(back.target_std == m.target_std);
        CHECK(back.vocab == m.vocab);

        std::stringstream again;
        save_model(again, back);
        std::stringstream first;
        save_model(first, m);
        CHECK(again.str() == first.str());
    }
    // labeled vocabulary survives the trip
    RecurrentModel lm = make_model(CellKind::lstm, Nonlinearity::tanh_fn, TaskKind::tree_lm,
                                   4, 3, Vocabulary::labeled({"C", "N", "O"}), 2);
    std::stringstream buf;
    save_model(buf, lm);
    CHECK(load_model(buf).vocab.symbols() == std::vector<std::string>{"C", "N", "O"});

    std::stringstream bad("graphseq-model v9\n");
    CHECK_THROWS_AS(load_model(bad), ValidationError);
}

TEST_CASE("forward handles long inputs at width 100 quickly") {
    RecurrentModel m = make_model(CellKind::lstm, Nonlinearity::tanh_fn,
                                  TaskKind::wiener_regression, 100, 16,
                                  Vocabulary::anonymized(), 4);
    std::vector<int> ids(10000, Vocabulary::kFirstSymbol);
    auto start = std::chrono::steady_clock::now();
    auto tr = forward(m, ids);
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    CHECK(tr.steps == 10000);
    CHECK(elapsed.count() < 10.0);
}

TEST_CASE("structure_invariance_gap") {
    Vocabulary anon = Vocabulary::anonymized();
    Graph example = make_graph(6, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}, {4, 5}},
                               {"A", "B", "C", "D", "E", "F"});

    // constant-output model: zero everywhere
    RecurrentModel constant = zero_model(CellKind::lstm);
    CHECK(structure_invariance_gap(constant, example, anon) == 0.0);

    // 2-node path: every end-vertex family is a singleton, so no pairs exist
    RecurrentModel random_model = small_model(CellKind::lstm, TaskKind::wiener_regression, 99);
    Graph tiny = make_graph(2, {{0, 1}});
    CHECK(structure_invariance_gap(random_model, tiny, anon) == 0.0);

    // a random-weight model on the six-node example has a positive gap
    CHECK(structure_invariance_gap(random_model, example, anon) > 0.0);

    CHECK_THROWS_AS(structure_invariance_gap(random_model, random_tree(12, 1), anon),
                    ValidationError);
}
