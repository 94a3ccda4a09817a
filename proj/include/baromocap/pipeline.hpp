#pragma once

#include <functional>
#include <ostream>

#include "baromocap/calibration.hpp"
#include "baromocap/checkpoint.hpp"
#include "baromocap/config.hpp"
#include "baromocap/ingest.hpp"
#include "baromocap/kinematics.hpp"
#include "baromocap/record.hpp"
#include "baromocap/synth_data.hpp"
#include "baromocap/training.hpp"

namespace baromocap {

struct EngineParams {
    double rate_hz = 30.0;
    bool subtract_gravity = false;
    KalmanParams filter;
};

/// Streaming orchestrator for one session. Per tick: calibration transforms,
/// per-device height fusion, feature building, both estimator forwards and
/// motion assembly. Single-owner (stateful recurrent cores and filters);
/// deterministic given the same packet sequence.
class Engine {
public:
    Engine(CalibProfile profile, Skeleton skel, PoseNet pose_net, VelocityNet velocity_net,
           EngineParams params = {});

    MotionState process(const SensorPacket& wrist, const SensorPacket& pocket);

    /// Degraded-stream policy: the held orientation and height keep flowing,
    /// the stale acceleration is zeroed (bounded drift), and the tick is
    /// counted.
    MotionState process(const AlignedFrame& frame);

    long frames() const { return frames_; }
    long degraded_ticks() const { return degraded_ticks_; }
    const std::vector<double>& latencies_ms() const { return latencies_ms_; }

private:
    CalibProfile profile_;
    Skeleton skel_;
    PoseNet pose_net_;
    VelocityNet velocity_net_;
    EngineParams params_;
    double dt_;

    HeightKalman wrist_kf_;
    HeightKalman pocket_kf_;
    PoseRunner pose_runner_;
    VelocityRunner velocity_runner_;

    RawFrame prev_raw_;
    Vec2 t_xz_ = Vec2::Zero();
    double h_glb_0_ = 0.0;
    double h_loc_0_ = 0.0;
    long frames_ = 0;
    long degraded_ticks_ = 0;
    std::vector<double> latencies_ms_;
};

/// Build an engine from a session config (loads profile, nets, skeleton).
Engine make_engine(const SessionConfig& cfg, const CalibProfile* profile_override = nullptr);

/// Synthetic session packets: the inverse of the ingestion path (world
/// accelerations to device frame, heights to pressure through the profile's
/// barometric models, orientations to wire quaternions). Both devices at the
/// sequence rate, fixed 2 ms transport latency.
std::vector<TimedPacket> packets_from_sequence(const SynthSequence& seq,
                                               const CalibProfile& profile,
                                               std::uint64_t start_us = 1000000);

/// Deterministic offline replay: packets run through the same reorder/align
/// machinery as live ingestion, driven by recorded receive times.
std::vector<MotionState> replay_record(const RecordFile& record, const SessionConfig& cfg);

/// Line-delimited text: frame index, time, translation xyz, then 24
/// axis-angle triples (world pose).
void write_motion_text(std::ostream& out, const std::vector<MotionState>& states);

/// Binary log: magic BMML, version, frame count, then per frame t/translation/
/// 24 rotation matrices as little-endian doubles.
void write_motion_binary(std::ostream& out, const std::vector<MotionState>& states);
std::vector<MotionState> read_motion_binary(std::istream& in);

/// Causal estimator pass over a dataset sequence: the pose runner is seeded
/// with the sequence's first-frame local pose, heights are consumed exactly
/// as stored (the synthetic noise stands in for the live baro+filter path).
struct SequenceEval {
    std::vector<JointRotations> pred_pose;  // world
    std::vector<JointRotations> gt_pose;
    std::vector<Vec3> pred_translation;  // displacement from frame 0
    std::vector<Vec3> gt_translation;
};
SequenceEval run_estimators(const SynthSequence& seq, const PoseNet& pose_net,
                            const VelocityNet& velocity_net, const Skeleton& skel);

/// Ground-truth motion stream of a synthetic sequence (for pred-vs-gt
/// fixtures and external scoring).
std::vector<MotionState> ground_truth_motion(const SynthSequence& seq);

struct LiveStats {
    long frames = 0;
    std::uint64_t queue_dropped = 0;
    std::uint64_t reorder_missing = 0;
    std::uint64_t reorder_late = 0;
};

/// Live session: ingestion (socket -> reorder -> align) and compute run on
/// separate stages joined by a bounded drop-oldest queue, so inference never
/// blocks the receive path.
LiveStats run_live(const SessionConfig& cfg, double duration_s,
                   const std::function<void(const MotionState&)>& on_state);

/// Record raw packets from a live endpoint without running the engine.
LiveStats record_live(const SessionConfig& cfg, const std::string& out_path,
                      double duration_s);

}  // namespace baromocap
