#pragma once

#include <functional>

#include "baromocap/neural.hpp"
#include "baromocap/synth_data.hpp"

namespace baromocap {

/// Fixed-length training window. inputs is (input_dim x T), targets is
/// (output_dim x T); for pose windows first_pose is the (local) pose 6D
/// encoding of the window's first frame.
struct PoseWindow {
    Vec first_pose;
    Mat inputs;
    Mat targets;
};

struct VelocityWindow {
    Mat inputs;
    Mat targets;  // interval velocities, 2 x T
};

struct DenseGrads {
    Mat w;
    Vec b;
};

struct LstmGrads {
    Mat w_ih;
    Mat w_hh;
    Vec b;
};

struct PoseNetGrads {
    std::vector<DenseGrads> encoder;
    std::vector<LstmGrads> core;
    DenseGrads head;

    static PoseNetGrads zeros_like(const PoseNet& net);
    void set_zero();
};

struct VelocityNetGrads {
    std::vector<LstmGrads> core;
    DenseGrads head;

    static VelocityNetGrads zeros_like(const VelocityNet& net);
    void set_zero();
};

/// Batch-mean loss, forward only (finite-difference oracles go through this).
double pose_batch_loss(const PoseNet& net, const std::vector<const PoseWindow*>& batch);
double velocity_batch_loss(const VelocityNet& net,
                           const std::vector<const VelocityWindow*>& batch);

/// Batch-mean loss plus analytic gradients via full backpropagation through
/// time. Large batches are processed in fixed-order micro-batches so BPTT
/// memory stays bounded; accumulation order is deterministic.
double pose_batch_grads(const PoseNet& net, const std::vector<const PoseWindow*>& batch,
                        PoseNetGrads& grads);
double velocity_batch_grads(const VelocityNet& net,
                            const std::vector<const VelocityWindow*>& batch,
                            VelocityNetGrads& grads);

/// Flat views over every parameter/gradient block in one fixed order
/// (encoder, core, head; matrices before biases).
std::vector<Eigen::Map<Vec>> param_views(PoseNet& net);
std::vector<Eigen::Map<Vec>> param_views(VelocityNet& net);
std::vector<Eigen::Map<Vec>> grad_views(PoseNetGrads& grads);
std::vector<Eigen::Map<Vec>> grad_views(VelocityNetGrads& grads);

class AdamOptimizer {
public:
    AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

    void step(std::vector<Eigen::Map<Vec>>& params, std::vector<Eigen::Map<Vec>>& grads);

private:
    double lr_;
    double b1_;
    double b2_;
    double eps_;
    long t_ = 0;
    std::vector<Vec> m_;
    std::vector<Vec> v_;
};

/// Scales all gradients so their global norm is at most max_norm; returns the
/// pre-clip norm.
double clip_global_norm(std::vector<Eigen::Map<Vec>>& grads, double max_norm);

struct TrainConfig {
    double lr = 3e-4;
    int batch = 256;
    int epochs = 100;
    int seq_len = 150;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 1.0;
    std::uint64_t seed = 0;
    long max_steps = 0;          // 0 = no step cap
    double budget_seconds = 0.0; // 0 = no wall-clock cap
    double target_loss = 0.0;    // stop once the epoch mean drops below (0 = off)
};

struct TrainReport {
    std::vector<double> epoch_mean_loss;
    long steps = 0;
    double seconds = 0.0;
    bool budget_exhausted = false;
};

using ProgressFn = std::function<void(int epoch, double mean_loss)>;

/// Deterministic given seed and data: shuffling, micro-batch order and
/// gradient reduction order are all fixed. Throws NonFiniteLoss (with the
/// step index) if the loss stops being finite.
TrainReport train_pose(PoseNet& net, const std::vector<PoseWindow>& windows,
                       const TrainConfig& cfg, const ProgressFn& progress = {});
TrainReport train_velocity(VelocityNet& net, const std::vector<VelocityWindow>& windows,
                           const TrainConfig& cfg, const ProgressFn& progress = {});

struct WindowSets {
    std::vector<PoseWindow> pose;
    std::vector<VelocityWindow> velocity;
};

/// Cut synthetic sequences into fixed-length windows. Windows start at frame
/// 1 so every velocity target is a true interval velocity and the thigh
/// angular rate has a preceding frame. stride defaults to non-overlapping.
WindowSets build_windows(const std::vector<SynthSequence>& sequences, int seq_len = 150,
                         int stride = 150);

}  // namespace baromocap
