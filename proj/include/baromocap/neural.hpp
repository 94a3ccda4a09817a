#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace baromocap {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class Activation { linear, relu };

struct DenseLayer {
    Mat w;  // out x in
    Vec b;  // out
    Activation act = Activation::linear;

    int input_dim() const { return static_cast<int>(w.cols()); }
    int output_dim() const { return static_cast<int>(w.rows()); }
};

struct DenseStack {
    std::vector<DenseLayer> layers;

    int input_dim() const { return layers.front().input_dim(); }
    int output_dim() const { return layers.back().output_dim(); }
};

/// One recurrent layer with the four standard gates. Gate parameter rows are
/// stacked input/forget/cell/output, each block `hidden` rows tall.
struct LstmLayer {
    Mat w_ih;  // 4H x in
    Mat w_hh;  // 4H x H
    Vec b;     // 4H

    int hidden() const { return static_cast<int>(w_hh.cols()); }
    int input_dim() const { return static_cast<int>(w_ih.cols()); }
};

struct LstmStack {
    std::vector<LstmLayer> layers;

    int hidden() const { return layers.front().hidden(); }
    int input_dim() const { return layers.front().input_dim(); }
    int num_layers() const { return static_cast<int>(layers.size()); }
};

/// Per-layer hidden and cell vectors (single stream) or matrices (batch).
struct LstmState {
    std::vector<Vec> h;
    std::vector<Vec> c;
};

/// Pose estimator: a dense stack encodes the first-frame pose into the
/// initial recurrent state (h and c of every layer), then a unidirectional
/// recurrent core with a linear head emits 24 x 6D joint rotations per frame.
struct PoseNet {
    DenseStack init_encoder;  // first_pose_dim -> ... -> 2 * layers * hidden
    LstmStack core;
    DenseLayer head;

    static PoseNet create(std::uint64_t seed, int input_dim = 22, int hidden = 512,
                          int layers = 2, int output_dim = 144, int first_pose_dim = 144);
};

/// Horizontal-velocity estimator: recurrent core with zero initial state and
/// a linear head emitting v_xz per frame.
struct VelocityNet {
    LstmStack core;
    DenseLayer head;

    static VelocityNet create(std::uint64_t seed, int input_dim = 25, int hidden = 512,
                              int layers = 2, int output_dim = 2);
};

Vec dense_layer_forward(const DenseLayer& layer, const Vec& x);
Vec dense_stack_forward(const DenseStack& stack, const Vec& x);

LstmState zero_state(const LstmStack& stack);

/// One recurrent step; updates state in place, returns the top hidden vector.
Vec lstm_step(const LstmStack& stack, LstmState& state, const Vec& x);

/// Initial recurrent state from the first-frame pose encoding. The encoder
/// output is split into (h, c) per layer, h blocks first.
LstmState encode_initial_state(const PoseNet& net, const Vec& first_pose);

/// Causal sequence forward: output at t depends only on inputs up to t.
/// Throws ShapeMismatch on wrong input dimensions.
std::vector<Vec> pose_forward(const PoseNet& net, const Vec& first_pose,
                              const std::vector<Vec>& seq);
std::vector<Eigen::Vector2d> velocity_forward(const VelocityNet& net,
                                              const std::vector<Vec>& seq);

/// Streaming single-owner runners holding the recurrent state between calls.
class PoseRunner {
public:
    explicit PoseRunner(const PoseNet& net) : net_(&net), state_(zero_state(net.core)) {}
    void reset(const Vec& first_pose);
    Vec step(const Vec& x);

private:
    const PoseNet* net_;
    LstmState state_;
};

class VelocityRunner {
public:
    explicit VelocityRunner(const VelocityNet& net)
        : net_(&net), state_(zero_state(net.core)) {}
    void reset();
    Eigen::Vector2d step(const Vec& x);

private:
    const VelocityNet* net_;
    LstmState state_;
};

/// Mean over frames of the squared L2 norm of the 144-component residual.
double pose_loss(const std::vector<Vec>& pred, const std::vector<Vec>& gt);

/// Squared norm of the difference between the summed predicted and summed
/// ground-truth velocities (order within the sequence is irrelevant).
double velocity_loss(const std::vector<Eigen::Vector2d>& pred,
                     const std::vector<Eigen::Vector2d>& gt);

}  // namespace baromocap
