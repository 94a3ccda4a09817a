#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "baromocap/feature_builder.hpp"
#include "baromocap/skeleton.hpp"

namespace baromocap {

struct ClipFrame {
    JointRotations pose;        // pelvis world orientation + parent-relative joints
    Vec3 root = Vec3::Zero();   // root translation, meters
};

struct MotionClip {
    double fps = 30.0;
    std::vector<ClipFrame> frames;
    std::string subject;
};

/// Uniform resampling: linear interpolation of translations, geodesic
/// interpolation of rotations. Resampling to the same rate is the identity.
MotionClip resample(const MotionClip& clip, double target_fps);

struct ImuSample {
    Vec3 a_lw = Vec3::Zero();  // m/s^2, world frame, gravity-free
    Vec3 a_rp = Vec3::Zero();
    Rot3 r_lw;                 // bone orientations at the sensor sites
    Rot3 r_rp;
};

/// Site orientations from FK; accelerations from second-order central
/// differences of world site positions (endpoints replicated). Optional
/// 5-frame moving average of positions before differencing (off by default).
/// Throws TooShort for clips under 3 frames.
std::vector<ImuSample> synth_imu(const MotionClip& clip, const Skeleton& skel,
                                 bool smooth_positions = false);

struct HeightPair {
    double h_lw = 0.0;  // meters above first-frame ground
    double h_rp = 0.0;
};

/// Ground = lowest foot site at frame 0; per-frame site heights above it
/// with i.i.d. Gaussian noise (wrist drawn before pocket at each frame).
std::vector<HeightPair> synth_heights(const MotionClip& clip, const Skeleton& skel,
                                      double noise_std, std::uint64_t seed);

/// Interval velocities of the root on the horizontal plane: entry i covers
/// frame i -> i+1, so the output has N-1 entries and sums exactly to the
/// total horizontal displacement times fps. Throws TooShort below 2 frames.
std::vector<Vec2> ground_truth_velocity(const MotionClip& clip);

struct SynthFrame {
    RawFrame raw;               // sensor-side view (heights noise-injected)
    JointRotations gt_pose;     // world pose
    Vec3 gt_root = Vec3::Zero();
    Vec2 gt_v = Vec2::Zero();   // interval velocity ending at this frame; 0 at frame 0
};

struct SynthSequence {
    std::string name;
    double fps = 30.0;
    std::vector<SynthFrame> frames;
};

struct SynthOptions {
    double height_noise_std = 0.05;
    std::uint64_t seed = 0;
    bool smooth_positions = false;
};

/// Full synthetic sensor stream for a clip (resampled to 30 Hz internally).
SynthSequence synthesize(const MotionClip& clip, const Skeleton& skel,
                         const SynthOptions& opt, const std::string& name);

/// Versioned binary container; round-trip is bitwise lossless.
void write_dataset(const std::vector<SynthSequence>& sequences, const std::string& path);
std::vector<SynthSequence> read_dataset(const std::string& path);

/// Text clip format: header lines (fps/joints/frames/subject), then one
/// frame per line as 24 axis-angle triples followed by the root xyz.
void write_clip(const MotionClip& clip, const std::string& path);
MotionClip load_clip(const std::string& path);

// Procedural clips. All hold a standing rest height so the feet start on
// the ground; rates/amplitudes are gentle enough for 30 Hz differencing.
MotionClip make_tpose_hold(const Skeleton& skel, double seconds, double fps);
MotionClip make_leg_lift(const Skeleton& skel, double seconds, double fps,
                         double max_angle_rad, double period_s);
MotionClip make_squat(const Skeleton& skel, double seconds, double fps,
                      double depth_m, double period_s);
MotionClip make_walk(const Skeleton& skel, double seconds, double fps,
                     double speed_mps, double stride_hz, double heading_rad);
MotionClip make_stair_climb(const Skeleton& skel, double seconds, double fps,
                            double ascent_mps, double advance_mps, double step_hz);

/// Labeled suite of randomized variants of every generator; seeds decorrelate
/// train/held-out splits.
std::vector<MotionClip> make_clip_suite(const Skeleton& skel, std::uint64_t seed,
                                        int variants_per_kind, double seconds = 20.0);

/// Pelvis height (m) that puts the lower rest-pose foot site on y = 0.
double standing_root_height(const Skeleton& skel);

}  // namespace baromocap
