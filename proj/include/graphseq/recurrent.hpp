#ifndef GRAPHSEQ_RECURRENT_HPP
#define GRAPHSEQ_RECURRENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "graphseq/codec.hpp"

namespace graphseq {

enum class CellKind { vanilla, lstm };
enum class Nonlinearity { tanh_fn, sigmoid_fn, identity_fn };
enum class TaskKind { wiener_regression, tree_lm };
enum class OlrTarget { output, hidden };

const char* to_string(CellKind);
const char* to_string(Nonlinearity);
const char* to_string(TaskKind);
const char* to_string(OlrTarget);

// Recurrent model over token ids, double precision throughout. At step t the
// model emits outputs from (h_t, x_t) and then updates h_{t+1} = f_u(h_t, x_t):
//   vanilla: h_{t+1} = sigma_h(A h_t + B x_t + b_h)
//   lstm:    standard gates, stacked row blocks in order i, f, g, o
// Cells can be stacked: layer l consumes layer l-1's fresh hidden state as its
// step input (layer 0 consumes the token embedding). Both heads are affine in
// the top layer's h_t and the token embedding x_t: a scalar regression head
// and a next-token logits head. Parameters live in one flat vector; the named
// offsets below carve it into blocks.
struct RecurrentModel {
    CellKind cell = CellKind::lstm;
    Nonlinearity sigma_h = Nonlinearity::tanh_fn;
    TaskKind task = TaskKind::wiener_regression;
    int hidden = 0;
    int embed = 0;
    int layers = 1;
    Vocabulary vocab;
    // regression outputs are produced in normalized space and mapped back by
    // prediction = raw * target_std + target_mean
    double target_mean = 0.0;
    double target_std = 1.0;

    std::vector<double> theta;
    std::size_t off_embedding = 0;
    std::vector<std::size_t> off_A, off_B, off_bh;  // vanilla cell, per layer
    std::vector<std::size_t> off_U, off_W, off_b;   // lstm cell (4H rows), per layer
    std::size_t off_reg_c = 0, off_reg_d = 0, off_reg_b = 0;
    std::size_t off_lm_C = 0, off_lm_D = 0, off_lm_b = 0;

    int vocab_size() const { return vocab.size(); }
    int input_width(int layer) const { return layer == 0 ? embed : hidden; }
    const double* p(std::size_t off) const { return theta.data() + off; }
    double* p(std::size_t off) { return theta.data() + off; }
    const double* embedding_row(int id) const {
        return p(off_embedding) + static_cast<std::size_t>(id) * embed;
    }
};

// Parameter init: uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per block,
// biases zero except the lstm forget gate bias (1.0).
RecurrentModel make_model(CellKind cell, Nonlinearity sigma_h, TaskKind task,
                          int hidden, int embed, Vocabulary vocab, std::uint64_t seed,
                          int layers = 1);

// Per-step states of one forward pass. Per layer, h holds L+1 rows of width H
// with h[0] = h_0 = 0; lstm runs also keep cell states and post-activation
// gates. h_at(t) reads the top layer, whose state feeds the heads.
struct ForwardTrace {
    std::vector<int> ids;
    int steps = 0;
    int width = 0;
    int layers = 1;
    // per layer: (L+1) x H (h, c) and L x 4H (gates) or L x H (pre)
    std::vector<std::vector<double>> h;
    std::vector<std::vector<double>> c;
    std::vector<std::vector<double>> gates;
    std::vector<std::vector<double>> pre;

    const double* h_at(int t, int layer) const {
        return h[layer].data() + static_cast<std::size_t>(t) * width;
    }
    const double* h_at(int t) const { return h_at(t, layers - 1); }
};

ForwardTrace forward(const RecurrentModel& m, const std::vector<int>& ids);

// Heads evaluated from a trace; step t reads (h_t, x_t).
double regression_output_at(const RecurrentModel& m, const ForwardTrace& tr, int t);
double regression_output(const RecurrentModel& m, const ForwardTrace& tr);  // last step
std::vector<double> lm_logits_at(const RecurrentModel& m, const ForwardTrace& tr, int t);

// Losses.
double task_loss_regression(const RecurrentModel& m, const std::vector<int>& ids,
                            double target);
double task_loss_lm(const RecurrentModel& m, const std::vector<int>& ids);
// Squared difference of the two final representations: the task head output
// under OlrTarget::output (scalar for regression, final logit array for lm),
// the final hidden state under OlrTarget::hidden.
double olr_loss(const RecurrentModel& m, const std::vector<int>& ids_a,
                const std::vector<int>& ids_b, OlrTarget target = OlrTarget::output);

// Exact BPTT gradients, accumulated (scaled) into grad, which must have
// m.theta's size. Returns the loss term's value.
double add_regression_gradient(const RecurrentModel& m, const std::vector<int>& ids,
                               double target, double scale, std::vector<double>& grad);
double add_lm_gradient(const RecurrentModel& m, const std::vector<int>& ids,
                       double scale, std::vector<double>& grad);
double add_olr_gradient(const RecurrentModel& m, const std::vector<int>& ids_a,
                        const std::vector<int>& ids_b, OlrTarget target, double scale,
                        std::vector<double>& grad);

// Gradient-descent update after global-norm clipping (no clipping when
// clip_norm <= 0). Throws RuntimeFailure on non-finite gradients.
void sgd_step(RecurrentModel& m, const std::vector<double>& grad, double learning_rate,
              double clip_norm);

// Autoregressive sampling from BOS until EOS or max_len generated tokens.
// temperature == 0 decodes greedily. Returned ids include BOS (and EOS when
// reached). Deterministic per seed.
std::vector<int> sample_sequence(const RecurrentModel& m, int max_len, double temperature,
                                 std::uint64_t seed);

// Versioned text checkpoint; parameters serialized as hexfloats so save/load
// round-trips bit-exactly.
void save_model(std::ostream& out, const RecurrentModel& m);
void save_model(const std::string& path, const RecurrentModel& m);
RecurrentModel load_model(std::istream& in);
RecurrentModel load_model(const std::string& path);

}  // namespace graphseq

#endif  // GRAPHSEQ_RECURRENT_HPP
