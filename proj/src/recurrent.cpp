#include "graphseq/recurrent.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "graphseq/error.hpp"
#include "graphseq/rng.hpp"

namespace graphseq {

const char* to_string(CellKind c) { return c == CellKind::vanilla ? "vanilla" : "lstm"; }
const char* to_string(Nonlinearity s) {
    switch (s) {
        case Nonlinearity::tanh_fn: return "tanh";
        case Nonlinearity::sigmoid_fn: return "sigmoid";
        default: return "identity";
    }
}
const char* to_string(TaskKind t) {
    return t == TaskKind::wiener_regression ? "wiener_regression" : "tree_lm";
}
const char* to_string(OlrTarget t) { return t == OlrTarget::output ? "output" : "hidden"; }

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double apply_sigma(Nonlinearity s, double x) {
    switch (s) {
        case Nonlinearity::tanh_fn: return std::tanh(x);
        case Nonlinearity::sigmoid_fn: return sigmoid(x);
        default: return x;
    }
}

// derivative expressed through the activation value y = sigma(x)
double sigma_prime_from_value(Nonlinearity s, double y) {
    switch (s) {
        case Nonlinearity::tanh_fn: return 1.0 - y * y;
        case Nonlinearity::sigmoid_fn: return y * (1.0 - y);
        default: return 1.0;
    }
}

void matvec(const double* M, const double* x, int r, int c, double* y) {
    for (int i = 0; i < r; ++i) {
        const double* row = M + static_cast<std::size_t>(i) * c;
        double s = 0.0;
        for (int j = 0; j < c; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

// out += M^T d
void matvec_t_add(const double* M, const double* d, int r, int c, double* out) {
    for (int i = 0; i < r; ++i) {
        const double di = d[i];
        if (di == 0.0) continue;
        const double* row = M + static_cast<std::size_t>(i) * c;
        for (int j = 0; j < c; ++j) out[j] += row[j] * di;
    }
}

// M += d x^T
void outer_add(double* M, const double* d, const double* x, int r, int c) {
    for (int i = 0; i < r; ++i) {
        const double di = d[i];
        if (di == 0.0) continue;
        double* row = M + static_cast<std::size_t>(i) * c;
        for (int j = 0; j < c; ++j) row[j] += di * x[j];
    }
}

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void check_ids(const RecurrentModel& m, const std::vector<int>& ids) {
    if (ids.empty()) throw ValidationError("forward: empty id sequence");
    for (int id : ids)
        if (id < 0 || id >= m.vocab_size())
            throw ValidationError("forward: token id out of range");
}

}  // namespace

RecurrentModel make_model(CellKind cell, Nonlinearity sigma_h, TaskKind task,
                          int hidden, int embed, Vocabulary vocab, std::uint64_t seed,
                          int layers) {
    if (hidden < 1 || embed < 1)
        throw ValidationError("make_model: hidden and embed widths must be positive");
    if (layers < 1) throw ValidationError("make_model: layers must be >= 1");
    RecurrentModel m;
    m.cell = cell;
    m.sigma_h = sigma_h;
    m.task = task;
    m.hidden = hidden;
    m.embed = embed;
    m.layers = layers;
    m.vocab = std::move(vocab);
    const std::size_t H = hidden, E = embed, V = m.vocab_size();

    std::size_t off = 0;
    auto block = [&off](std::size_t n) {
        std::size_t start = off;
        off += n;
        return start;
    };
    m.off_embedding = block(V * E);
    for (int l = 0; l < layers; ++l) {
        const std::size_t In = m.input_width(l);
        if (cell == CellKind::vanilla) {
            m.off_A.push_back(block(H * H));
            m.off_B.push_back(block(H * In));
            m.off_bh.push_back(block(H));
        } else {
            m.off_U.push_back(block(4 * H * H));
            m.off_W.push_back(block(4 * H * In));
            m.off_b.push_back(block(4 * H));
        }
    }
    m.off_reg_c = block(H);
    m.off_reg_d = block(E);
    m.off_reg_b = block(1);
    m.off_lm_C = block(V * H);
    m.off_lm_D = block(V * E);
    m.off_lm_b = block(V);
    m.theta.assign(off, 0.0);

    Rng rng(seed);
    auto fill = [&](std::size_t start, std::size_t count, std::size_t fan_in) {
        const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i)
            m.theta[start + i] = rng.uniform_real(-a, a);
    };
    fill(m.off_embedding, V * E, E);
    for (int l = 0; l < layers; ++l) {
        const std::size_t In = m.input_width(l);
        if (cell == CellKind::vanilla) {
            fill(m.off_A[l], H * H, H);
            fill(m.off_B[l], H * In, In);
        } else {
            fill(m.off_U[l], 4 * H * H, H);
            fill(m.off_W[l], 4 * H * In, In);
            // forget gate bias starts at 1
            for (std::size_t i = 0; i < H; ++i) m.theta[m.off_b[l] + H + i] = 1.0;
        }
    }
    fill(m.off_reg_c, H, H);
    fill(m.off_reg_d, E, E);
    fill(m.off_lm_C, V * H, H);
    fill(m.off_lm_D, V * E, E);
    return m;
}

ForwardTrace forward(const RecurrentModel& m, const std::vector<int>& ids) {
    check_ids(m, ids);
    const int L = static_cast<int>(ids.size());
    const int H = m.hidden;
    ForwardTrace tr;
    tr.ids = ids;
    tr.steps = L;
    tr.width = H;
    tr.layers = m.layers;
    tr.h.assign(m.layers, std::vector<double>(static_cast<std::size_t>(L + 1) * H, 0.0));
    if (m.cell == CellKind::lstm) {
        tr.c.assign(m.layers, std::vector<double>(static_cast<std::size_t>(L + 1) * H, 0.0));
        tr.gates.assign(m.layers,
                        std::vector<double>(static_cast<std::size_t>(L) * 4 * H, 0.0));
    } else {
        tr.pre.assign(m.layers, std::vector<double>(static_cast<std::size_t>(L) * H, 0.0));
    }
    std::vector<double> tmp(m.cell == CellKind::lstm ? 4 * H : H);
    for (int t = 0; t < L; ++t) {
        const double* x = m.embedding_row(ids[t]);
        for (int l = 0; l < m.layers; ++l) {
            const int In = m.input_width(l);
            const double* h_t = tr.h[l].data() + static_cast<std::size_t>(t) * H;
            double* h_next = tr.h[l].data() + static_cast<std::size_t>(t + 1) * H;
            if (m.cell == CellKind::vanilla) {
                double* pre = tr.pre[l].data() + static_cast<std::size_t>(t) * H;
                matvec(m.p(m.off_A[l]), h_t, H, H, pre);
                matvec(m.p(m.off_B[l]), x, H, In, tmp.data());
                const double* bh = m.p(m.off_bh[l]);
                for (int i = 0; i < H; ++i) pre[i] += tmp[i] + bh[i];
                for (int i = 0; i < H; ++i) h_next[i] = apply_sigma(m.sigma_h, pre[i]);
            } else {
                double* a = tr.gates[l].data() + static_cast<std::size_t>(t) * 4 * H;
                matvec(m.p(m.off_U[l]), h_t, 4 * H, H, a);
                matvec(m.p(m.off_W[l]), x, 4 * H, In, tmp.data());
                const double* b = m.p(m.off_b[l]);
                for (int i = 0; i < 4 * H; ++i) a[i] += tmp[i] + b[i];
                const double* c_t = tr.c[l].data() + static_cast<std::size_t>(t) * H;
                double* c_next = tr.c[l].data() + static_cast<std::size_t>(t + 1) * H;
                for (int i = 0; i < H; ++i) {
                    const double gi = sigmoid(a[i]);
                    const double gf = sigmoid(a[H + i]);
                    const double gg = std::tanh(a[2 * H + i]);
                    const double go = sigmoid(a[3 * H + i]);
                    a[i] = gi;
                    a[H + i] = gf;
                    a[2 * H + i] = gg;
                    a[3 * H + i] = go;
                    c_next[i] = gf * c_t[i] + gi * gg;
                    h_next[i] = go * std::tanh(c_next[i]);
                }
            }
            x = tr.h[l].data() + static_cast<std::size_t>(t + 1) * H;  // feeds layer l+1
        }
    }
    return tr;
}

double regression_output_at(const RecurrentModel& m, const ForwardTrace& tr, int t) {
    const double* h_t = tr.h_at(t);
    const double* x = m.embedding_row(tr.ids[t]);
    return dot(m.p(m.off_reg_c), h_t, m.hidden) + dot(m.p(m.off_reg_d), x, m.embed) +
           m.theta[m.off_reg_b];
}

double regression_output(const RecurrentModel& m, const ForwardTrace& tr) {
    return regression_output_at(m, tr, tr.steps - 1);
}

std::vector<double> lm_logits_at(const RecurrentModel& m, const ForwardTrace& tr, int t) {
    const int V = m.vocab_size();
    std::vector<double> logits(V);
    matvec(m.p(m.off_lm_C), tr.h_at(t), V, m.hidden, logits.data());
    std::vector<double> dx(V);
    matvec(m.p(m.off_lm_D), m.embedding_row(tr.ids[t]), V, m.embed, dx.data());
    const double* b = m.p(m.off_lm_b);
    for (int i = 0; i < V; ++i) logits[i] += dx[i] + b[i];
    return logits;
}

namespace {

// Per-step loss gradients fed into one BPTT pass. Empty containers mean the
// corresponding head does not participate.
struct StepGrads {
    std::vector<double> d_reg;                // size L (zeros where unused)
    std::vector<std::vector<double>> d_lm;    // size L, entries may be empty
    std::vector<double> d_h_final;            // size H
};

void backward(const RecurrentModel& m, const ForwardTrace& tr, const StepGrads& sg,
              std::vector<double>& grad) {
    const int L = tr.steps, H = m.hidden, E = m.embed, V = m.vocab_size();
    const int top = m.layers - 1;
    // dh[l] holds dL/dh^l_{t+1}, dc[l] the lstm cell-state counterpart
    std::vector<std::vector<double>> dh(m.layers, std::vector<double>(H, 0.0));
    std::vector<std::vector<double>> dc(m.layers, std::vector<double>(H, 0.0));
    std::vector<double> dh_prev(H), dx(std::max(E, H)), da;
    da.assign(m.cell == CellKind::lstm ? 4 * H : H, 0.0);
    if (!sg.d_h_final.empty())
        for (int i = 0; i < H; ++i) dh[top][i] = sg.d_h_final[i];

    std::vector<double> dx_embed(E);
    for (int t = L - 1; t >= 0; --t) {
        const double* x_embed = m.embedding_row(tr.ids[t]);
        std::fill(dx_embed.begin(), dx_embed.end(), 0.0);

        // heads at step t read (h^top_t, x_t); their pull on h^top_t is folded
        // in after the top cell's backward step below
        double head_d = (!sg.d_reg.empty() && sg.d_reg[t] != 0.0) ? sg.d_reg[t] : 0.0;
        const double* head_dl =
            (!sg.d_lm.empty() && !sg.d_lm[t].empty()) ? sg.d_lm[t].data() : nullptr;

        for (int l = top; l >= 0; --l) {
            const int In = m.input_width(l);
            const double* h_t = tr.h[l].data() + static_cast<std::size_t>(t) * H;
            const double* x_l =
                l == 0 ? x_embed : tr.h[l - 1].data() + static_cast<std::size_t>(t + 1) * H;
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            std::fill(dx.begin(), dx.begin() + In, 0.0);

            // cell step t at layer l: (h^l_t, x^l_t) -> h^l_{t+1}
            if (m.cell == CellKind::vanilla) {
                const double* h_next = tr.h[l].data() + static_cast<std::size_t>(t + 1) * H;
                for (int i = 0; i < H; ++i)
                    da[i] = dh[l][i] * sigma_prime_from_value(m.sigma_h, h_next[i]);
                outer_add(grad.data() + m.off_A[l], da.data(), h_t, H, H);
                outer_add(grad.data() + m.off_B[l], da.data(), x_l, H, In);
                for (int i = 0; i < H; ++i) grad[m.off_bh[l] + i] += da[i];
                matvec_t_add(m.p(m.off_A[l]), da.data(), H, H, dh_prev.data());
                matvec_t_add(m.p(m.off_B[l]), da.data(), H, In, dx.data());
            } else {
                const double* g4 = tr.gates[l].data() + static_cast<std::size_t>(t) * 4 * H;
                const double* c_t = tr.c[l].data() + static_cast<std::size_t>(t) * H;
                const double* c_next = tr.c[l].data() + static_cast<std::size_t>(t + 1) * H;
                for (int i = 0; i < H; ++i) {
                    const double gi = g4[i], gf = g4[H + i], gg = g4[2 * H + i],
                                 go = g4[3 * H + i];
                    const double tc = std::tanh(c_next[i]);
                    const double d_o = dh[l][i] * tc;
                    const double dct = dc[l][i] + dh[l][i] * go * (1.0 - tc * tc);
                    const double d_i = dct * gg;
                    const double d_g = dct * gi;
                    const double d_f = dct * c_t[i];
                    dc[l][i] = dct * gf;  // becomes dc for step t-1
                    da[i] = d_i * gi * (1.0 - gi);
                    da[H + i] = d_f * gf * (1.0 - gf);
                    da[2 * H + i] = d_g * (1.0 - gg * gg);
                    da[3 * H + i] = d_o * go * (1.0 - go);
                }
                outer_add(grad.data() + m.off_U[l], da.data(), h_t, 4 * H, H);
                outer_add(grad.data() + m.off_W[l], da.data(), x_l, 4 * H, In);
                for (int i = 0; i < 4 * H; ++i) grad[m.off_b[l] + i] += da[i];
                matvec_t_add(m.p(m.off_U[l]), da.data(), 4 * H, H, dh_prev.data());
                matvec_t_add(m.p(m.off_W[l]), da.data(), 4 * H, In, dx.data());
            }

            if (l == top) {
                if (head_d != 0.0) {
                    const double* rc = m.p(m.off_reg_c);
                    const double* rd = m.p(m.off_reg_d);
                    for (int i = 0; i < H; ++i) {
                        grad[m.off_reg_c + i] += head_d * h_t[i];
                        dh_prev[i] += head_d * rc[i];
                    }
                    for (int j = 0; j < E; ++j) {
                        grad[m.off_reg_d + j] += head_d * x_embed[j];
                        dx_embed[j] += head_d * rd[j];
                    }
                    grad[m.off_reg_b] += head_d;
                }
                if (head_dl) {
                    outer_add(grad.data() + m.off_lm_C, head_dl, h_t, V, H);
                    outer_add(grad.data() + m.off_lm_D, head_dl, x_embed, V, E);
                    for (int i = 0; i < V; ++i) grad[m.off_lm_b + i] += head_dl[i];
                    matvec_t_add(m.p(m.off_lm_C), head_dl, V, H, dh_prev.data());
                    matvec_t_add(m.p(m.off_lm_D), head_dl, V, E, dx_embed.data());
                }
            }

            // the cell input is the embedding (layer 0) or the layer below's
            // fresh state h^{l-1}_{t+1}
            if (l == 0) {
                for (int j = 0; j < E; ++j) dx_embed[j] += dx[j];
            } else {
                for (int i = 0; i < H; ++i) dh[l - 1][i] += dx[i];
            }
            std::swap(dh[l], dh_prev);
        }

        double* emb = grad.data() + m.off_embedding + static_cast<std::size_t>(tr.ids[t]) * E;
        for (int j = 0; j < E; ++j) emb[j] += dx_embed[j];
    }
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

}  // namespace

double task_loss_regression(const RecurrentModel& m, const std::vector<int>& ids,
                            double target) {
    ForwardTrace tr = forward(m, ids);
    const double r = regression_output(m, tr) - target;
    return r * r;
}

double task_loss_lm(const RecurrentModel& m, const std::vector<int>& ids) {
    if (ids.size() < 2) throw ValidationError("task_loss_lm: need at least 2 tokens");
    ForwardTrace tr = forward(m, ids);
    const int steps = tr.steps - 1;
    double total = 0.0;
    for (int t = 0; t < steps; ++t) {
        auto logits = lm_logits_at(m, tr, t);
        auto p = softmax(logits);
        total += -std::log(std::max(p[ids[t + 1]], 1e-300));
    }
    return total / steps;
}

double olr_loss(const RecurrentModel& m, const std::vector<int>& ids_a,
                const std::vector<int>& ids_b, OlrTarget target) {
    ForwardTrace ta = forward(m, ids_a);
    ForwardTrace tb = forward(m, ids_b);
    if (target == OlrTarget::hidden) {
        const double* ha = ta.h_at(ta.steps);
        const double* hb = tb.h_at(tb.steps);
        double s = 0.0;
        for (int i = 0; i < m.hidden; ++i) {
            const double d = ha[i] - hb[i];
            s += d * d;
        }
        return s;
    }
    if (m.task == TaskKind::tree_lm) {
        auto la = lm_logits_at(m, ta, ta.steps - 1);
        auto lb = lm_logits_at(m, tb, tb.steps - 1);
        double s = 0.0;
        for (std::size_t i = 0; i < la.size(); ++i) {
            const double d = la[i] - lb[i];
            s += d * d;
        }
        return s;
    }
    const double d = regression_output(m, ta) - regression_output(m, tb);
    return d * d;
}

double add_regression_gradient(const RecurrentModel& m, const std::vector<int>& ids,
                               double target, double scale, std::vector<double>& grad) {
    ForwardTrace tr = forward(m, ids);
    const double r = regression_output(m, tr) - target;
    StepGrads sg;
    sg.d_reg.assign(tr.steps, 0.0);
    sg.d_reg[tr.steps - 1] = 2.0 * r * scale;
    backward(m, tr, sg, grad);
    return r * r;
}

double add_lm_gradient(const RecurrentModel& m, const std::vector<int>& ids, double scale,
                       std::vector<double>& grad) {
    if (ids.size() < 2) throw ValidationError("task_loss_lm: need at least 2 tokens");
    ForwardTrace tr = forward(m, ids);
    const int steps = tr.steps - 1;
    StepGrads sg;
    sg.d_lm.resize(tr.steps);
    double total = 0.0;
    for (int t = 0; t < steps; ++t) {
        auto logits = lm_logits_at(m, tr, t);
        auto p = softmax(logits);
        total += -std::log(std::max(p[ids[t + 1]], 1e-300));
        auto& d = sg.d_lm[t];
        d = std::move(p);
        d[ids[t + 1]] -= 1.0;
        for (double& v : d) v *= scale / steps;
    }
    backward(m, tr, sg, grad);
    return total / steps;
}

double add_olr_gradient(const RecurrentModel& m, const std::vector<int>& ids_a,
                        const std::vector<int>& ids_b, OlrTarget target, double scale,
                        std::vector<double>& grad) {
    ForwardTrace ta = forward(m, ids_a);
    ForwardTrace tb = forward(m, ids_b);
    double loss = 0.0;
    StepGrads sa, sb;
    if (target == OlrTarget::hidden) {
        const double* ha = ta.h_at(ta.steps);
        const double* hb = tb.h_at(tb.steps);
        sa.d_h_final.assign(m.hidden, 0.0);
        sb.d_h_final.assign(m.hidden, 0.0);
        for (int i = 0; i < m.hidden; ++i) {
            const double d = ha[i] - hb[i];
            loss += d * d;
            sa.d_h_final[i] = 2.0 * d * scale;
            sb.d_h_final[i] = -2.0 * d * scale;
        }
    } else if (m.task == TaskKind::tree_lm) {
        auto la = lm_logits_at(m, ta, ta.steps - 1);
        auto lb = lm_logits_at(m, tb, tb.steps - 1);
        sa.d_lm.resize(ta.steps);
        sb.d_lm.resize(tb.steps);
        auto& da = sa.d_lm[ta.steps - 1];
        auto& db = sb.d_lm[tb.steps - 1];
        da.resize(la.size());
        db.resize(la.size());
        for (std::size_t i = 0; i < la.size(); ++i) {
            const double d = la[i] - lb[i];
            loss += d * d;
            da[i] = 2.0 * d * scale;
            db[i] = -2.0 * d * scale;
        }
    } else {
        const double d = regression_output(m, ta) - regression_output(m, tb);
        loss = d * d;
        sa.d_reg.assign(ta.steps, 0.0);
        sb.d_reg.assign(tb.steps, 0.0);
        sa.d_reg[ta.steps - 1] = 2.0 * d * scale;
        sb.d_reg[tb.steps - 1] = -2.0 * d * scale;
    }
    backward(m, ta, sa, grad);
    backward(m, tb, sb, grad);
    return loss;
}

void sgd_step(RecurrentModel& m, const std::vector<double>& grad, double learning_rate,
              double clip_norm) {
    if (grad.size() != m.theta.size())
        throw ValidationError("sgd_step: gradient size mismatch");
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    if (!std::isfinite(sq))
        throw RuntimeFailure("sgd_step: non-finite gradient; training halted");
    double scale = 1.0;
    const double norm = std::sqrt(sq);
    if (clip_norm > 0.0 && norm > clip_norm) scale = clip_norm / norm;
    for (std::size_t i = 0; i < m.theta.size(); ++i)
        m.theta[i] -= learning_rate * scale * grad[i];
}

std::vector<int> sample_sequence(const RecurrentModel& m, int max_len, double temperature,
                                 std::uint64_t seed) {
    if (max_len < 1) throw ValidationError("sample_sequence: max_len must be >= 1");
    if (temperature < 0.0) throw ValidationError("sample_sequence: negative temperature");
    Rng rng(seed);
    const int H = m.hidden, E = m.embed, V = m.vocab_size();
    std::vector<std::vector<double>> h(m.layers, std::vector<double>(H, 0.0));
    std::vector<std::vector<double>> c(m.layers, std::vector<double>(H, 0.0));
    std::vector<double> a(4 * H), tmp(std::max(4 * H, V)), logits(V), x_in(std::max(E, H));
    std::vector<int> ids{Vocabulary::kBos};
    int cur = Vocabulary::kBos;
    for (int produced = 0; produced < max_len; ++produced) {
        const double* x = m.embedding_row(cur);
        // next-token logits from the top layer's state and the current token
        matvec(m.p(m.off_lm_C), h[m.layers - 1].data(), V, H, logits.data());
        matvec(m.p(m.off_lm_D), x, V, E, tmp.data());
        const double* lb = m.p(m.off_lm_b);
        for (int i = 0; i < V; ++i) logits[i] += tmp[i] + lb[i];

        int next;
        if (temperature == 0.0) {
            next = 0;
            for (int i = 1; i < V; ++i)
                if (logits[i] > logits[next]) next = i;
        } else {
            for (int i = 0; i < V; ++i) logits[i] /= temperature;
            auto p = softmax(logits);
            double r = rng.uniform_real01(), acc = 0.0;
            next = V - 1;
            for (int i = 0; i < V; ++i) {
                acc += p[i];
                if (r < acc) {
                    next = i;
                    break;
                }
            }
        }
        ids.push_back(next);
        if (next == Vocabulary::kEos) break;

        // state update consuming x, layer by layer
        std::copy(x, x + E, x_in.begin());
        for (int l = 0; l < m.layers; ++l) {
            const int In = m.input_width(l);
            if (m.cell == CellKind::vanilla) {
                std::vector<double> pre(H);
                matvec(m.p(m.off_A[l]), h[l].data(), H, H, pre.data());
                matvec(m.p(m.off_B[l]), x_in.data(), H, In, tmp.data());
                const double* bh = m.p(m.off_bh[l]);
                for (int i = 0; i < H; ++i)
                    h[l][i] = apply_sigma(m.sigma_h, pre[i] + tmp[i] + bh[i]);
            } else {
                matvec(m.p(m.off_U[l]), h[l].data(), 4 * H, H, a.data());
                matvec(m.p(m.off_W[l]), x_in.data(), 4 * H, In, tmp.data());
                const double* b = m.p(m.off_b[l]);
                for (int i = 0; i < H; ++i) {
                    const double gi = sigmoid(a[i] + tmp[i] + b[i]);
                    const double gf = sigmoid(a[H + i] + tmp[H + i] + b[H + i]);
                    const double gg = std::tanh(a[2 * H + i] + tmp[2 * H + i] + b[2 * H + i]);
                    const double go = sigmoid(a[3 * H + i] + tmp[3 * H + i] + b[3 * H + i]);
                    c[l][i] = gf * c[l][i] + gi * gg;
                    h[l][i] = go * std::tanh(c[l][i]);
                }
            }
            std::copy(h[l].begin(), h[l].end(), x_in.begin());
        }
        cur = next;
    }
    return ids;
}

namespace {

std::string hexfloat(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_hexfloat(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw ValidationError("checkpoint: bad float '" + s + "'");
    return v;
}

std::string expect_kv(std::istream& in, const std::string& key) {
    std::string k, v;
    if (!(in >> k >> v) || k != key)
        throw ValidationError("checkpoint: expected '" + key + "'");
    return v;
}

}  // namespace

void save_model(std::ostream& out, const RecurrentModel& m) {
    out << "graphseq-model v1\n";
    out << "task " << to_string(m.task) << '\n';
    out << "cell " << to_string(m.cell) << '\n';
    out << "sigma_h " << to_string(m.sigma_h) << '\n';
    out << "hidden " << m.hidden << '\n';
    out << "embed " << m.embed << '\n';
    out << "layers " << m.layers << '\n';
    if (m.vocab.mode() == VocabMode::anonymized) {
        out << "vocab anonymized\n";
    } else {
        out << "vocab labeled " << m.vocab.symbols().size() << '\n';
        for (const auto& s : m.vocab.symbols()) out << s << '\n';
    }
    out << "target_mean " << hexfloat(m.target_mean) << '\n';
    out << "target_std " << hexfloat(m.target_std) << '\n';
    out << "params " << m.theta.size() << '\n';
    for (double v : m.theta) out << hexfloat(v) << '\n';
}

void save_model(const std::string& path, const RecurrentModel& m) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write model file '" + path + "'");
    save_model(out, m);
    if (!out) throw RuntimeFailure("write failed for '" + path + "'");
}

RecurrentModel load_model(std::istream& in) {
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "graphseq-model" || version != "v1")
        throw ValidationError("checkpoint: bad header");
    std::string task = expect_kv(in, "task");
    std::string cell = expect_kv(in, "cell");
    std::string sigma = expect_kv(in, "sigma_h");
    int hidden = std::stoi(expect_kv(in, "hidden"));
    int embed = std::stoi(expect_kv(in, "embed"));
    int layers = std::stoi(expect_kv(in, "layers"));

    std::string vk, vmode;
    if (!(in >> vk >> vmode) || vk != "vocab") throw ValidationError("checkpoint: expected vocab");
    Vocabulary vocab = Vocabulary::anonymized();
    if (vmode == "labeled") {
        std::size_t count = 0;
        in >> count;
        std::vector<std::string> symbols(count);
        for (auto& s : symbols)
            if (!(in >> s)) throw ValidationError("checkpoint: truncated vocabulary");
        vocab = Vocabulary::labeled(std::move(symbols));
    } else if (vmode != "anonymized") {
        throw ValidationError("checkpoint: unknown vocab mode '" + vmode + "'");
    }

    CellKind ck = cell == "vanilla" ? CellKind::vanilla : CellKind::lstm;
    if (cell != "vanilla" && cell != "lstm")
        throw ValidationError("checkpoint: unknown cell '" + cell + "'");
    Nonlinearity sh;
    if (sigma == "tanh") sh = Nonlinearity::tanh_fn;
    else if (sigma == "sigmoid") sh = Nonlinearity::sigmoid_fn;
    else if (sigma == "identity") sh = Nonlinearity::identity_fn;
    else throw ValidationError("checkpoint: unknown sigma_h '" + sigma + "'");
    TaskKind tk;
    if (task == "wiener_regression") tk = TaskKind::wiener_regression;
    else if (task == "tree_lm") tk = TaskKind::tree_lm;
    else throw ValidationError("checkpoint: unknown task '" + task + "'");

    RecurrentModel m = make_model(ck, sh, tk, hidden, embed, std::move(vocab), 0, layers);
    m.target_mean = parse_hexfloat(expect_kv(in, "target_mean"));
    m.target_std = parse_hexfloat(expect_kv(in, "target_std"));
    std::size_t n = std::stoull(expect_kv(in, "params"));
    if (n != m.theta.size()) throw ValidationError("checkpoint: parameter count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        std::string tok;
        if (!(in >> tok)) throw ValidationError("checkpoint: truncated parameters");
        m.theta[i] = parse_hexfloat(tok);
    }
    return m;
}

RecurrentModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file '" + path + "'");
    return load_model(in);
}

}  // namespace graphseq
