#pragma once

#include <string>
#include <vector>

#include "baromocap/baro_fusion.hpp"
#include "baromocap/skeleton.hpp"

namespace baromocap {

/// Raw per-device capture used by calibration (pre-filter, device world frame).
struct DeviceFrame {
    Vec3 accel = Vec3::Zero();  // m/s^2
    Rot3 orient;                // device -> world
    double pressure_hpa = 1013.25;
    double t = 0.0;             // seconds
};

struct CalibFramePair {
    DeviceFrame wrist;
    DeviceFrame pocket;
};

enum class CalibLabel { same_height, t_pose };

/// A captured calibration window: at least 2 s at 30 Hz (60 pairs), devices
/// paired within 50 ms.
struct CalibSampleSet {
    CalibLabel label = CalibLabel::same_height;
    std::vector<CalibFramePair> frames;
};

struct CalibProfile {
    BaroModel wrist;
    BaroModel pocket;
    Rot3 wrist_offset;   // device frame -> bone frame
    Rot3 pocket_offset;
    Rot3 world_yaw;      // heading alignment applied on the left
    double ground_height = 0.0;  // meters, in the barometric absolute frame

    void save(const std::string& path) const;
    static CalibProfile load(const std::string& path);
    std::string to_text() const;
    static CalibProfile from_text(const std::string& text);
};

/// Same-height window: the pocket device is the reference (bias 0); the
/// wrist bias makes both devices report equal height over the window.
/// Returns (wrist_bias_m, pocket_bias_m). Throws NotStationary when either
/// device moves (acceleration std >= 0.3 m/s^2), BadSampleSet on a bad window.
std::pair<double, double> estimate_bias(const CalibSampleSet& same_height,
                                        const BaroModel& wrist_model,
                                        const BaroModel& pocket_model);

/// T-pose window with bias already applied: rescales so the mean wrist-pocket
/// height difference equals known_dh. Throws DegenerateSpan when the
/// bias-adjusted pressure span is below 0.005 hPa or known_dh is zero.
double estimate_scale(const CalibSampleSet& t_pose, const BaroModel& wrist_with_bias,
                      const BaroModel& pocket, double known_dh = 0.66);

struct FrameAlignment {
    Rot3 wrist_offset;
    Rot3 pocket_offset;
    Rot3 world_yaw;
};

/// T-pose device-to-bone offsets: r_offset = mean(R_measured)^T composed with
/// the canonical T-pose bone orientation (identity in the calibration world
/// frame). Throws ExcessiveMotion when orientation varies more than 5 degrees
/// within the window.
FrameAlignment align_frames(const CalibSampleSet& t_pose);

/// Ground reference in the barometric absolute frame: the absolute pocket
/// height at frame 0 minus the pose-derived thigh-site height above the
/// lower foot.
double set_ground(const JointRotations& first_frame_pose, const Skeleton& skel,
                  double h_pocket_absolute);

/// Full two-step procedure: bias from the same-height window, scale from the
/// T-pose window (wrist bias rescaled accordingly), frame alignment, and the
/// ground reference assuming a T-pose first frame.
CalibProfile calibrate(const CalibSampleSet& same_height, const CalibSampleSet& t_pose,
                       const Skeleton& skel, double known_dh = 0.66,
                       double reference_hpa = 1013.25,
                       double initial_scale_m_per_hpa = 8.43);

}  // namespace baromocap
