#pragma once

#include <Eigen/Dense>

#include "baromocap/skeleton.hpp"

namespace baromocap {

inline constexpr int kPoseInputDim = 22;
inline constexpr int kTransInputDim = 25;
inline constexpr int kPoseOutputDim = kNumJoints * 6;  // 144
inline constexpr double kFrameDt = 1.0 / 30.0;

/// Version tag for the flattening order below. Stored in checkpoint files;
/// trained weights are only valid against a matching layout.
inline constexpr std::uint32_t kFeatureLayoutVersion = 1;

/// World gravity direction (unit); the world frame is y-up.
inline const Vec3 kGravityDir{0.0, -1.0, 0.0};

using PoseFeature = Eigen::Matrix<double, kPoseInputDim, 1>;
using TransFeature = Eigen::Matrix<double, kTransInputDim, 1>;
using PoseVector = Eigen::Matrix<double, kPoseOutputDim, 1>;  // 24 x 6D rotations

/// One aligned engine frame: world-frame free accelerations, world-frame
/// bone orientations and ground-relative filtered heights for both devices.
struct RawFrame {
    Vec3 a_lw = Vec3::Zero();
    Vec3 a_rp = Vec3::Zero();
    Rot3 r_lw;
    Rot3 r_rp;
    double h_lw = 0.0;
    double h_rp = 0.0;
    double t = 0.0;  // seconds
};

/// Pose-estimator input in the thigh-rooted local frame.
struct PoseInput {
    Vec3 a_lw_local = Vec3::Zero();
    Vec3 a_rp_local = Vec3::Zero();
    Rot3 r_lw_local;
    Vec3 w_rp_local = Vec3::Zero();  // rad/s
    Vec3 g_local = kGravityDir;      // unit
    double dh = 0.0;                 // h_lw - h_rp, meters

    /// Flattening order: a_lw_local, a_rp_local, r_lw_local (column-major),
    /// w_rp_local, g_local, dh.
    PoseFeature flatten() const;
    static PoseInput unflatten(const PoseFeature& v);
};

/// Translation-estimator input in the world frame.
struct TransInput {
    Vec3 a_lw = Vec3::Zero();
    Vec3 a_rp = Vec3::Zero();
    Rot3 r_lw;
    Rot3 r_rp;
    double dh = 0.0;

    /// Flattening order: a_lw, a_rp, r_lw (column-major), r_rp (column-major), dh.
    TransFeature flatten() const;
    static TransInput unflatten(const TransFeature& v);
};

/// Rotate measurements into the thigh frame of the current frame; angular
/// velocity comes from the thigh orientation increment over dt.
PoseInput build_pose_input(const RawFrame& curr, const RawFrame& prev,
                           double dt = kFrameDt);

TransInput build_trans_input(const RawFrame& curr);

/// Thigh-local pose -> world pose: the pelvis entry is re-rooted by the
/// thigh orientation, parent-relative entries pass through.
JointRotations localize_pose_output(const JointRotations& theta_local, const Rot3& r_rp);

/// Inverse of localize_pose_output (used when preparing training targets).
JointRotations delocalize_pose(const JointRotations& theta_world, const Rot3& r_rp);

/// 24 x 6D encoding of a pose, joint-major.
PoseVector flatten_pose_6d(const JointRotations& theta);

/// Decode a 24 x 6D vector back to rotations (throws DegenerateInput on a
/// degenerate joint block).
JointRotations unflatten_pose_6d(const PoseVector& v);

}  // namespace baromocap
