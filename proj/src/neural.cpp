#include "baromocap/neural.hpp"

#include <cmath>
#include <random>

#include "baromocap/errors.hpp"

namespace baromocap {

namespace {

Mat uniform_matrix(std::mt19937_64& rng, int rows, int cols, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    Mat m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = dist(rng);
    return m;
}

DenseLayer make_dense(std::mt19937_64& rng, int in, int out, Activation act) {
    DenseLayer layer;
    layer.w = uniform_matrix(rng, out, in, 1.0 / std::sqrt(static_cast<double>(in)));
    layer.b = Vec::Zero(out);
    layer.act = act;
    return layer;
}

LstmLayer make_lstm_layer(std::mt19937_64& rng, int in, int hidden) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    LstmLayer layer;
    layer.w_ih = uniform_matrix(rng, 4 * hidden, in, bound);
    layer.w_hh = uniform_matrix(rng, 4 * hidden, hidden, bound);
    layer.b = Vec::Zero(4 * hidden);
    layer.b.segment(hidden, hidden).setConstant(1.0);  // forget-gate bias
    return layer;
}

LstmStack make_lstm_stack(std::mt19937_64& rng, int in, int hidden, int layers) {
    LstmStack stack;
    stack.layers.reserve(static_cast<size_t>(layers));
    for (int l = 0; l < layers; ++l) {
        stack.layers.push_back(make_lstm_layer(rng, l == 0 ? in : hidden, hidden));
    }
    return stack;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

PoseNet PoseNet::create(std::uint64_t seed, int input_dim, int hidden, int layers,
                        int output_dim, int first_pose_dim) {
    std::mt19937_64 rng(seed);
    PoseNet net;
    // 3-layer encoder: first_pose -> hidden -> hidden -> 2 * layers * hidden.
    net.init_encoder.layers.push_back(make_dense(rng, first_pose_dim, hidden, Activation::relu));
    net.init_encoder.layers.push_back(make_dense(rng, hidden, hidden, Activation::relu));
    net.init_encoder.layers.push_back(
        make_dense(rng, hidden, 2 * layers * hidden, Activation::linear));
    net.core = make_lstm_stack(rng, input_dim, hidden, layers);
    net.head = make_dense(rng, hidden, output_dim, Activation::linear);
    return net;
}

VelocityNet VelocityNet::create(std::uint64_t seed, int input_dim, int hidden, int layers,
                                int output_dim) {
    std::mt19937_64 rng(seed);
    VelocityNet net;
    net.core = make_lstm_stack(rng, input_dim, hidden, layers);
    net.head = make_dense(rng, hidden, output_dim, Activation::linear);
    return net;
}

Vec dense_layer_forward(const DenseLayer& layer, const Vec& x) {
    if (x.size() != layer.w.cols()) {
        throw ShapeMismatch("dense layer expects " + std::to_string(layer.w.cols()) +
                            " inputs, got " + std::to_string(x.size()));
    }
    Vec y = layer.w * x + layer.b;
    if (layer.act == Activation::relu) y = y.cwiseMax(0.0);
    return y;
}

Vec dense_stack_forward(const DenseStack& stack, const Vec& x) {
    Vec y = x;
    for (const DenseLayer& layer : stack.layers) y = dense_layer_forward(layer, y);
    return y;
}

LstmState zero_state(const LstmStack& stack) {
    LstmState s;
    s.h.assign(stack.layers.size(), Vec::Zero(stack.hidden()));
    s.c.assign(stack.layers.size(), Vec::Zero(stack.hidden()));
    return s;
}

Vec lstm_step(const LstmStack& stack, LstmState& state, const Vec& x) {
    if (x.size() != stack.input_dim()) {
        throw ShapeMismatch("recurrent stack expects " + std::to_string(stack.input_dim()) +
                            " inputs, got " + std::to_string(x.size()));
    }
    Vec layer_in = x;
    for (size_t l = 0; l < stack.layers.size(); ++l) {
        const LstmLayer& layer = stack.layers[l];
        const int h = layer.hidden();
        const Vec pre = layer.w_ih * layer_in + layer.w_hh * state.h[l] + layer.b;
        Vec c = state.c[l];
        Vec h_out(h);
        for (int k = 0; k < h; ++k) {
            const double gi = sigmoid(pre[k]);
            const double gf = sigmoid(pre[h + k]);
            const double gg = std::tanh(pre[2 * h + k]);
            const double go = sigmoid(pre[3 * h + k]);
            c[k] = gf * c[k] + gi * gg;
            h_out[k] = go * std::tanh(c[k]);
        }
        state.c[l] = std::move(c);
        state.h[l] = h_out;
        layer_in = std::move(h_out);
    }
    return layer_in;
}

LstmState encode_initial_state(const PoseNet& net, const Vec& first_pose) {
    const Vec enc = dense_stack_forward(net.init_encoder, first_pose);
    const int layers = net.core.num_layers();
    const int h = net.core.hidden();
    if (enc.size() != 2 * layers * h) {
        throw ShapeMismatch("init encoder output does not match recurrent state size");
    }
    LstmState s = zero_state(net.core);
    for (int l = 0; l < layers; ++l) {
        s.h[static_cast<size_t>(l)] = enc.segment(l * h, h);
        s.c[static_cast<size_t>(l)] = enc.segment((layers + l) * h, h);
    }
    return s;
}

std::vector<Vec> pose_forward(const PoseNet& net, const Vec& first_pose,
                              const std::vector<Vec>& seq) {
    LstmState state = encode_initial_state(net, first_pose);
    std::vector<Vec> out;
    out.reserve(seq.size());
    for (const Vec& x : seq) {
        const Vec top = lstm_step(net.core, state, x);
        out.push_back(dense_layer_forward(net.head, top));
    }
    return out;
}

std::vector<Eigen::Vector2d> velocity_forward(const VelocityNet& net,
                                              const std::vector<Vec>& seq) {
    LstmState state = zero_state(net.core);
    std::vector<Eigen::Vector2d> out;
    out.reserve(seq.size());
    for (const Vec& x : seq) {
        const Vec top = lstm_step(net.core, state, x);
        out.push_back(Eigen::Vector2d(dense_layer_forward(net.head, top)));
    }
    return out;
}

void PoseRunner::reset(const Vec& first_pose) {
    state_ = encode_initial_state(*net_, first_pose);
}

Vec PoseRunner::step(const Vec& x) {
    return dense_layer_forward(net_->head, lstm_step(net_->core, state_, x));
}

void VelocityRunner::reset() { state_ = zero_state(net_->core); }

Eigen::Vector2d VelocityRunner::step(const Vec& x) {
    return Eigen::Vector2d(dense_layer_forward(net_->head, lstm_step(net_->core, state_, x)));
}

double pose_loss(const std::vector<Vec>& pred, const std::vector<Vec>& gt) {
    if (pred.size() != gt.size()) {
        throw LengthMismatch("pose_loss: " + std::to_string(pred.size()) + " vs " +
                             std::to_string(gt.size()) + " frames");
    }
    if (pred.empty()) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        acc += (pred[i] - gt[i]).squaredNorm();
    }
    return acc / static_cast<double>(pred.size());
}

double velocity_loss(const std::vector<Eigen::Vector2d>& pred,
                     const std::vector<Eigen::Vector2d>& gt) {
    if (pred.size() != gt.size()) {
        throw LengthMismatch("velocity_loss: " + std::to_string(pred.size()) + " vs " +
                             std::to_string(gt.size()) + " frames");
    }
    Eigen::Vector2d diff = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < pred.size(); ++i) diff += pred[i] - gt[i];
    return diff.squaredNorm();
}

}  // namespace baromocap
