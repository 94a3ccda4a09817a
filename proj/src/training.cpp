#include "baromocap/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "baromocap/errors.hpp"
#include "baromocap/feature_builder.hpp"

namespace baromocap {

namespace {

constexpr int kMicroBatch = 32;

using Arr = Eigen::ArrayXXd;

Mat sigmoid_mat(const Mat& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

// Per-layer, per-step forward quantities kept for backpropagation through
// time. Gates are stored post-activation, rows stacked input|forget|cell|output.
struct LstmSeqCache {
    std::vector<std::vector<Mat>> gates;
    std::vector<std::vector<Mat>> cell;
    std::vector<std::vector<Mat>> hidden;
};

void lstm_seq_forward(const LstmStack& stack, const std::vector<Mat>& x,
                      const std::vector<Mat>& h0, const std::vector<Mat>& c0,
                      LstmSeqCache& cache) {
    const int layers = stack.num_layers();
    const auto steps = x.size();
    const int h = stack.hidden();
    cache.gates.assign(static_cast<size_t>(layers), {});
    cache.cell.assign(static_cast<size_t>(layers), {});
    cache.hidden.assign(static_cast<size_t>(layers), {});
    for (int l = 0; l < layers; ++l) {
        const auto lu = static_cast<size_t>(l);
        const LstmLayer& layer = stack.layers[lu];
        cache.gates[lu].resize(steps);
        cache.cell[lu].resize(steps);
        cache.hidden[lu].resize(steps);
        for (size_t t = 0; t < steps; ++t) {
            const Mat& in = (l == 0) ? x[t] : cache.hidden[lu - 1][t];
            const Mat& h_prev = (t == 0) ? h0[lu] : cache.hidden[lu][t - 1];
            const Mat& c_prev = (t == 0) ? c0[lu] : cache.cell[lu][t - 1];

            Mat pre = layer.w_ih * in + layer.w_hh * h_prev;
            pre.colwise() += layer.b;

            Mat gates(4 * h, pre.cols());
            gates.topRows(h) = sigmoid_mat(pre.topRows(h));
            gates.middleRows(h, h) = sigmoid_mat(pre.middleRows(h, h));
            gates.middleRows(2 * h, h) = pre.middleRows(2 * h, h).array().tanh();
            gates.bottomRows(h) = sigmoid_mat(pre.bottomRows(h));

            Mat c = (gates.middleRows(h, h).array() * c_prev.array() +
                     gates.topRows(h).array() * gates.middleRows(2 * h, h).array())
                        .matrix();
            Mat hidden = (gates.bottomRows(h).array() * c.array().tanh()).matrix();

            cache.gates[lu][t] = std::move(gates);
            cache.cell[lu][t] = std::move(c);
            cache.hidden[lu][t] = std::move(hidden);
        }
    }
}

// dtop holds dL/d(top hidden) per step. On return dh0/dc0 hold dL/d(h0, c0).
void lstm_seq_backward(const LstmStack& stack, const std::vector<Mat>& x,
                       const std::vector<Mat>& h0, const std::vector<Mat>& c0,
                       const LstmSeqCache& cache, const std::vector<Mat>& dtop,
                       std::vector<LstmGrads>& grads, std::vector<Mat>& dh0,
                       std::vector<Mat>& dc0) {
    const int layers = stack.num_layers();
    const int steps = static_cast<int>(x.size());
    const int h = stack.hidden();
    const auto cols = x[0].cols();

    std::vector<Mat> dh_time(static_cast<size_t>(layers), Mat::Zero(h, cols));
    std::vector<Mat> dc_time(static_cast<size_t>(layers), Mat::Zero(h, cols));
    Mat dfrom_above;

    for (int t = steps - 1; t >= 0; --t) {
        const auto tu = static_cast<size_t>(t);
        for (int l = layers - 1; l >= 0; --l) {
            const auto lu = static_cast<size_t>(l);
            const LstmLayer& layer = stack.layers[lu];

            Mat dh = dh_time[lu];
            if (l == layers - 1) dh += dtop[tu];
            else dh += dfrom_above;

            const Mat& gates = cache.gates[lu][tu];
            const auto gi = gates.topRows(h).array();
            const auto gf = gates.middleRows(h, h).array();
            const auto gg = gates.middleRows(2 * h, h).array();
            const auto go = gates.bottomRows(h).array();
            const Arr tanh_c = cache.cell[lu][tu].array().tanh();
            const Mat& c_prev = (t == 0) ? c0[lu] : cache.cell[lu][tu - 1];

            const Arr dc = dc_time[lu].array() + dh.array() * go * (1.0 - tanh_c.square());
            const Arr do_ = dh.array() * tanh_c;

            Mat dpre(4 * h, cols);
            dpre.topRows(h) = (dc * gg * gi * (1.0 - gi)).matrix();
            dpre.middleRows(h, h) = (dc * c_prev.array() * gf * (1.0 - gf)).matrix();
            dpre.middleRows(2 * h, h) = (dc * gi * (1.0 - gg.square())).matrix();
            dpre.bottomRows(h) = (do_ * go * (1.0 - go)).matrix();

            const Mat& in = (l == 0) ? x[tu] : cache.hidden[lu - 1][tu];
            const Mat& h_prev = (t == 0) ? h0[lu] : cache.hidden[lu][tu - 1];
            grads[lu].w_ih.noalias() += dpre * in.transpose();
            grads[lu].w_hh.noalias() += dpre * h_prev.transpose();
            grads[lu].b += dpre.rowwise().sum();

            dh_time[lu].noalias() = layer.w_hh.transpose() * dpre;
            dc_time[lu] = (dc * gf).matrix();
            if (l > 0) dfrom_above.noalias() = layer.w_ih.transpose() * dpre;
        }
    }
    dh0 = std::move(dh_time);
    dc0 = std::move(dc_time);
}

Mat dense_stack_forward_batch(const DenseStack& stack, const Mat& x,
                              std::vector<Mat>* post_cache) {
    Mat cur = x;
    for (const DenseLayer& layer : stack.layers) {
        Mat pre = layer.w * cur;
        pre.colwise() += layer.b;
        if (layer.act == Activation::relu) pre = pre.cwiseMax(0.0);
        if (post_cache) post_cache->push_back(pre);
        cur = std::move(pre);
    }
    return cur;
}

void dense_stack_backward_batch(const DenseStack& stack, const Mat& x,
                                const std::vector<Mat>& post, const Mat& dout,
                                std::vector<DenseGrads>& grads) {
    Mat dcur = dout;
    for (int l = static_cast<int>(stack.layers.size()) - 1; l >= 0; --l) {
        const auto lu = static_cast<size_t>(l);
        const DenseLayer& layer = stack.layers[lu];
        if (layer.act == Activation::relu) {
            dcur = (dcur.array() * (post[lu].array() > 0.0).cast<double>()).matrix();
        }
        const Mat& in = (l == 0) ? x : post[lu - 1];
        grads[lu].w.noalias() += dcur * in.transpose();
        grads[lu].b += dcur.rowwise().sum();
        if (l > 0) dcur = layer.w.transpose() * dcur;
    }
}

void check_windows_consistent(long t_expected, long t_actual, const char* what) {
    if (t_expected != t_actual) {
        throw ShapeMismatch(std::string(what) + ": windows must share one sequence length");
    }
}

std::vector<Mat> gather_inputs(const std::vector<const Mat*>& inputs, int t_len) {
    const int b = static_cast<int>(inputs.size());
    const auto dim = inputs[0]->rows();
    std::vector<Mat> x(static_cast<size_t>(t_len), Mat(dim, b));
    for (int t = 0; t < t_len; ++t) {
        for (int j = 0; j < b; ++j) {
            x[static_cast<size_t>(t)].col(j) = inputs[static_cast<size_t>(j)]->col(t);
        }
    }
    return x;
}

}  // namespace

PoseNetGrads PoseNetGrads::zeros_like(const PoseNet& net) {
    PoseNetGrads g;
    for (const DenseLayer& l : net.init_encoder.layers) {
        g.encoder.push_back({Mat::Zero(l.w.rows(), l.w.cols()), Vec::Zero(l.b.size())});
    }
    for (const LstmLayer& l : net.core.layers) {
        g.core.push_back({Mat::Zero(l.w_ih.rows(), l.w_ih.cols()),
                          Mat::Zero(l.w_hh.rows(), l.w_hh.cols()), Vec::Zero(l.b.size())});
    }
    g.head = {Mat::Zero(net.head.w.rows(), net.head.w.cols()), Vec::Zero(net.head.b.size())};
    return g;
}

void PoseNetGrads::set_zero() {
    for (DenseGrads& g : encoder) {
        g.w.setZero();
        g.b.setZero();
    }
    for (LstmGrads& g : core) {
        g.w_ih.setZero();
        g.w_hh.setZero();
        g.b.setZero();
    }
    head.w.setZero();
    head.b.setZero();
}

VelocityNetGrads VelocityNetGrads::zeros_like(const VelocityNet& net) {
    VelocityNetGrads g;
    for (const LstmLayer& l : net.core.layers) {
        g.core.push_back({Mat::Zero(l.w_ih.rows(), l.w_ih.cols()),
                          Mat::Zero(l.w_hh.rows(), l.w_hh.cols()), Vec::Zero(l.b.size())});
    }
    g.head = {Mat::Zero(net.head.w.rows(), net.head.w.cols()), Vec::Zero(net.head.b.size())};
    return g;
}

void VelocityNetGrads::set_zero() {
    for (LstmGrads& g : core) {
        g.w_ih.setZero();
        g.w_hh.setZero();
        g.b.setZero();
    }
    head.w.setZero();
    head.b.setZero();
}

double pose_batch_loss(const PoseNet& net, const std::vector<const PoseWindow*>& batch) {
    double acc = 0.0;
    for (const PoseWindow* w : batch) {
        LstmState state = encode_initial_state(net, w->first_pose);
        const auto t_len = w->inputs.cols();
        double window_acc = 0.0;
        for (long t = 0; t < t_len; ++t) {
            const Vec y =
                dense_layer_forward(net.head, lstm_step(net.core, state, w->inputs.col(t)));
            window_acc += (y - w->targets.col(t)).squaredNorm();
        }
        acc += window_acc / static_cast<double>(t_len);
    }
    return acc / static_cast<double>(batch.size());
}

double velocity_batch_loss(const VelocityNet& net,
                           const std::vector<const VelocityWindow*>& batch) {
    double acc = 0.0;
    for (const VelocityWindow* w : batch) {
        LstmState state = zero_state(net.core);
        Eigen::Vector2d diff = Eigen::Vector2d::Zero();
        for (long t = 0; t < w->inputs.cols(); ++t) {
            const Vec y =
                dense_layer_forward(net.head, lstm_step(net.core, state, w->inputs.col(t)));
            diff += Eigen::Vector2d(y) - Eigen::Vector2d(w->targets.col(t));
        }
        acc += diff.squaredNorm();
    }
    return acc / static_cast<double>(batch.size());
}

double pose_batch_grads(const PoseNet& net, const std::vector<const PoseWindow*>& batch,
                        PoseNetGrads& grads) {
    const int b_total = static_cast<int>(batch.size());
    const auto t_len = batch[0]->inputs.cols();
    const int layers = net.core.num_layers();
    const int h = net.core.hidden();
    double loss_acc = 0.0;

    for (int start = 0; start < b_total; start += kMicroBatch) {
        const int b = std::min<int>(kMicroBatch, b_total - start);
        std::vector<const Mat*> input_ptrs;
        Mat first_pose(batch[0]->first_pose.size(), b);
        for (int j = 0; j < b; ++j) {
            const PoseWindow* w = batch[static_cast<size_t>(start + j)];
            check_windows_consistent(t_len, w->inputs.cols(), "pose_batch_grads");
            input_ptrs.push_back(&w->inputs);
            first_pose.col(j) = w->first_pose;
        }
        const std::vector<Mat> x = gather_inputs(input_ptrs, static_cast<int>(t_len));

        std::vector<Mat> enc_post;
        const Mat enc_out = dense_stack_forward_batch(net.init_encoder, first_pose, &enc_post);
        std::vector<Mat> h0(static_cast<size_t>(layers));
        std::vector<Mat> c0(static_cast<size_t>(layers));
        for (int l = 0; l < layers; ++l) {
            h0[static_cast<size_t>(l)] = enc_out.middleRows(l * h, h);
            c0[static_cast<size_t>(l)] = enc_out.middleRows((layers + l) * h, h);
        }

        LstmSeqCache cache;
        lstm_seq_forward(net.core, x, h0, c0, cache);
        const auto& top = cache.hidden[static_cast<size_t>(layers - 1)];

        // Head forward, residuals and loss in one pass.
        const double scale = 2.0 / (static_cast<double>(t_len) * b_total);
        std::vector<Mat> dtop(static_cast<size_t>(t_len));
        for (long t = 0; t < t_len; ++t) {
            Mat y = net.head.w * top[static_cast<size_t>(t)];
            y.colwise() += net.head.b;
            for (int j = 0; j < b; ++j) {
                y.col(j) -= batch[static_cast<size_t>(start + j)]->targets.col(t);
            }
            loss_acc += y.squaredNorm() / static_cast<double>(t_len);
            const Mat dy = scale * y;
            grads.head.w.noalias() += dy * top[static_cast<size_t>(t)].transpose();
            grads.head.b += dy.rowwise().sum();
            dtop[static_cast<size_t>(t)] = net.head.w.transpose() * dy;
        }

        std::vector<Mat> dh0;
        std::vector<Mat> dc0;
        lstm_seq_backward(net.core, x, h0, c0, cache, dtop, grads.core, dh0, dc0);

        Mat denc(2 * layers * h, b);
        for (int l = 0; l < layers; ++l) {
            denc.middleRows(l * h, h) = dh0[static_cast<size_t>(l)];
            denc.middleRows((layers + l) * h, h) = dc0[static_cast<size_t>(l)];
        }
        dense_stack_backward_batch(net.init_encoder, first_pose, enc_post, denc,
                                   grads.encoder);
    }
    return loss_acc / b_total;
}

double velocity_batch_grads(const VelocityNet& net,
                            const std::vector<const VelocityWindow*>& batch,
                            VelocityNetGrads& grads) {
    const int b_total = static_cast<int>(batch.size());
    const auto t_len = batch[0]->inputs.cols();
    const int layers = net.core.num_layers();
    const int h = net.core.hidden();
    double loss_acc = 0.0;

    for (int start = 0; start < b_total; start += kMicroBatch) {
        const int b = std::min<int>(kMicroBatch, b_total - start);
        std::vector<const Mat*> input_ptrs;
        for (int j = 0; j < b; ++j) {
            const VelocityWindow* w = batch[static_cast<size_t>(start + j)];
            check_windows_consistent(t_len, w->inputs.cols(), "velocity_batch_grads");
            input_ptrs.push_back(&w->inputs);
        }
        const std::vector<Mat> x = gather_inputs(input_ptrs, static_cast<int>(t_len));

        std::vector<Mat> h0(static_cast<size_t>(layers), Mat::Zero(h, b));
        std::vector<Mat> c0(static_cast<size_t>(layers), Mat::Zero(h, b));
        LstmSeqCache cache;
        lstm_seq_forward(net.core, x, h0, c0, cache);
        const auto& top = cache.hidden[static_cast<size_t>(layers - 1)];

        // Only the summed residual matters for the loss, so the output
        // gradient is shared by every step.
        const auto out_dim = net.head.b.size();
        std::vector<Mat> y(static_cast<size_t>(t_len));
        Mat summed = Mat::Zero(out_dim, b);
        for (long t = 0; t < t_len; ++t) {
            Mat yt = net.head.w * top[static_cast<size_t>(t)];
            yt.colwise() += net.head.b;
            for (int j = 0; j < b; ++j) {
                yt.col(j) -= batch[static_cast<size_t>(start + j)]->targets.col(t);
            }
            summed += yt;
            y[static_cast<size_t>(t)] = std::move(yt);
        }
        loss_acc += summed.colwise().squaredNorm().sum();

        const Mat dy = (2.0 / b_total) * summed;
        std::vector<Mat> dtop(static_cast<size_t>(t_len));
        for (long t = 0; t < t_len; ++t) {
            grads.head.w.noalias() += dy * top[static_cast<size_t>(t)].transpose();
            grads.head.b += dy.rowwise().sum();
            dtop[static_cast<size_t>(t)] = net.head.w.transpose() * dy;
        }

        std::vector<Mat> dh0;
        std::vector<Mat> dc0;
        lstm_seq_backward(net.core, x, h0, c0, cache, dtop, grads.core, dh0, dc0);
    }
    return loss_acc / b_total;
}

namespace {

void append_view(std::vector<Eigen::Map<Vec>>& views, Mat& m) {
    views.emplace_back(m.data(), m.size());
}
void append_view(std::vector<Eigen::Map<Vec>>& views, Vec& v) {
    views.emplace_back(v.data(), v.size());
}

}  // namespace

std::vector<Eigen::Map<Vec>> param_views(PoseNet& net) {
    std::vector<Eigen::Map<Vec>> views;
    for (DenseLayer& l : net.init_encoder.layers) {
        append_view(views, l.w);
        append_view(views, l.b);
    }
    for (LstmLayer& l : net.core.layers) {
        append_view(views, l.w_ih);
        append_view(views, l.w_hh);
        append_view(views, l.b);
    }
    append_view(views, net.head.w);
    append_view(views, net.head.b);
    return views;
}

std::vector<Eigen::Map<Vec>> param_views(VelocityNet& net) {
    std::vector<Eigen::Map<Vec>> views;
    for (LstmLayer& l : net.core.layers) {
        append_view(views, l.w_ih);
        append_view(views, l.w_hh);
        append_view(views, l.b);
    }
    append_view(views, net.head.w);
    append_view(views, net.head.b);
    return views;
}

std::vector<Eigen::Map<Vec>> grad_views(PoseNetGrads& grads) {
    std::vector<Eigen::Map<Vec>> views;
    for (DenseGrads& g : grads.encoder) {
        append_view(views, g.w);
        append_view(views, g.b);
    }
    for (LstmGrads& g : grads.core) {
        append_view(views, g.w_ih);
        append_view(views, g.w_hh);
        append_view(views, g.b);
    }
    append_view(views, grads.head.w);
    append_view(views, grads.head.b);
    return views;
}

std::vector<Eigen::Map<Vec>> grad_views(VelocityNetGrads& grads) {
    std::vector<Eigen::Map<Vec>> views;
    for (LstmGrads& g : grads.core) {
        append_view(views, g.w_ih);
        append_view(views, g.w_hh);
        append_view(views, g.b);
    }
    append_view(views, grads.head.w);
    append_view(views, grads.head.b);
    return views;
}

void AdamOptimizer::step(std::vector<Eigen::Map<Vec>>& params,
                         std::vector<Eigen::Map<Vec>>& grads) {
    if (params.size() != grads.size()) {
        throw ShapeMismatch("optimizer: parameter/gradient block count mismatch");
    }
    if (m_.empty()) {
        for (const auto& g : grads) {
            m_.push_back(Vec::Zero(g.size()));
            v_.push_back(Vec::Zero(g.size()));
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    for (size_t k = 0; k < params.size(); ++k) {
        m_[k] = b1_ * m_[k] + (1.0 - b1_) * grads[k];
        v_[k] = (b2_ * v_[k].array() + (1.0 - b2_) * grads[k].array().square()).matrix();
        params[k].array() -=
            lr_ * (m_[k].array() / bc1) / ((v_[k].array() / bc2).sqrt() + eps_);
    }
}

double clip_global_norm(std::vector<Eigen::Map<Vec>>& grads, double max_norm) {
    double sq = 0.0;
    for (const auto& g : grads) sq += g.squaredNorm();
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (auto& g : grads) g *= scale;
    }
    return norm;
}

namespace {

template <class Net, class Window, class Grads>
TrainReport train_impl(Net& net, const std::vector<Window>& windows, const TrainConfig& cfg,
                       const ProgressFn& progress,
                       double (*batch_fn)(const Net&, const std::vector<const Window*>&,
                                          Grads&)) {
    if (windows.empty()) throw ShapeMismatch("train: empty window set");
    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    };

    std::mt19937_64 rng(cfg.seed);
    std::vector<size_t> order(windows.size());
    std::iota(order.begin(), order.end(), size_t{0});

    Grads grads = Grads::zeros_like(net);
    auto params = param_views(net);
    auto gviews = grad_views(grads);
    AdamOptimizer opt(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);

    TrainReport report;
    bool stop = false;
    for (int epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_acc = 0.0;
        int batches = 0;
        for (size_t at = 0; at < order.size() && !stop; at += static_cast<size_t>(cfg.batch)) {
            std::vector<const Window*> batch;
            const size_t end = std::min(order.size(), at + static_cast<size_t>(cfg.batch));
            batch.reserve(end - at);
            for (size_t k = at; k < end; ++k) batch.push_back(&windows[order[k]]);

            grads.set_zero();
            const double loss = batch_fn(net, batch, grads);
            if (!std::isfinite(loss)) {
                throw NonFiniteLoss("training diverged at step " +
                                    std::to_string(report.steps + 1));
            }
            clip_global_norm(gviews, cfg.clip_norm);
            opt.step(params, gviews);
            ++report.steps;
            loss_acc += loss;
            ++batches;

            if (cfg.max_steps > 0 && report.steps >= cfg.max_steps) stop = true;
            if (cfg.budget_seconds > 0.0 && elapsed() >= cfg.budget_seconds) {
                stop = true;
                report.budget_exhausted = true;
            }
        }
        const double mean = loss_acc / std::max(1, batches);
        report.epoch_mean_loss.push_back(mean);
        if (progress) progress(epoch, mean);
        if (cfg.target_loss > 0.0 && mean <= cfg.target_loss) stop = true;
    }
    report.seconds = elapsed();
    return report;
}

}  // namespace

TrainReport train_pose(PoseNet& net, const std::vector<PoseWindow>& windows,
                       const TrainConfig& cfg, const ProgressFn& progress) {
    return train_impl<PoseNet, PoseWindow, PoseNetGrads>(net, windows, cfg, progress,
                                                         &pose_batch_grads);
}

TrainReport train_velocity(VelocityNet& net, const std::vector<VelocityWindow>& windows,
                           const TrainConfig& cfg, const ProgressFn& progress) {
    return train_impl<VelocityNet, VelocityWindow, VelocityNetGrads>(
        net, windows, cfg, progress, &velocity_batch_grads);
}

WindowSets build_windows(const std::vector<SynthSequence>& sequences, int seq_len,
                         int stride) {
    if (seq_len < 1 || stride < 1) throw ShapeMismatch("build_windows: bad seq_len/stride");
    WindowSets out;
    for (const SynthSequence& seq : sequences) {
        const auto n = seq.frames.size();
        if (n < static_cast<size_t>(seq_len) + 1) continue;

        std::vector<PoseFeature> pose_feat(n);
        std::vector<PoseVector> pose_target(n);
        std::vector<TransFeature> trans_feat(n);
        for (size_t i = 0; i < n; ++i) {
            const RawFrame& prev = seq.frames[i == 0 ? 0 : i - 1].raw;
            pose_feat[i] = build_pose_input(seq.frames[i].raw, prev).flatten();
            pose_target[i] = flatten_pose_6d(
                delocalize_pose(seq.frames[i].gt_pose, seq.frames[i].raw.r_rp));
            trans_feat[i] = build_trans_input(seq.frames[i].raw).flatten();
        }

        // Start at frame 1: every velocity target is then a true interval
        // velocity and the thigh rate at the window head has a predecessor.
        for (size_t s = 1; s + static_cast<size_t>(seq_len) <= n;
             s += static_cast<size_t>(stride)) {
            PoseWindow pw;
            pw.first_pose = pose_target[s];
            pw.inputs.resize(kPoseInputDim, seq_len);
            pw.targets.resize(kPoseOutputDim, seq_len);
            VelocityWindow vw;
            vw.inputs.resize(kTransInputDim, seq_len);
            vw.targets.resize(2, seq_len);
            for (int t = 0; t < seq_len; ++t) {
                const size_t i = s + static_cast<size_t>(t);
                pw.inputs.col(t) = pose_feat[i];
                pw.targets.col(t) = pose_target[i];
                vw.inputs.col(t) = trans_feat[i];
                vw.targets.col(t) = seq.frames[i].gt_v;
            }
            out.pose.push_back(std::move(pw));
            out.velocity.push_back(std::move(vw));
        }
    }
    return out;
}

}  // namespace baromocap
