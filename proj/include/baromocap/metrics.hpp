#pragma once

#include <string>
#include <vector>

#include "baromocap/kinematics.hpp"

namespace baromocap {

/// Upper arms and upper legs: the joint subset behind the headline rotation
/// metric for sparse-sensor trackers.
inline const std::vector<int> kSipJoints = {1, 2, 16, 17};

/// All joints except the root.
std::vector<int> non_root_joints();

/// Mean geodesic angle (degrees) between predicted and ground-truth global
/// joint rotations over the given subset.
double angular_error_deg(const std::array<Rot3, kNumJoints>& pred_global,
                         const std::array<Rot3, kNumJoints>& gt_global,
                         const std::vector<int>& joint_subset);

/// Mean joint position error in centimeters with the root aligned, averaged
/// over the non-root joints.
double positional_error_cm(const JointRotations& pred_pose, const JointRotations& gt_pose,
                           const Skeleton& skel);

struct PoseErrorReport {
    double sip_deg = 0.0;
    double ang_deg = 0.0;
    double pos_cm = 0.0;
    std::vector<double> sip_series;
    std::vector<double> ang_series;
    std::vector<double> pos_series;
};

/// Per-frame series plus means over a pose sequence (poses as pelvis
/// orientation + parent-relative joints; globals are composed internally).
PoseErrorReport evaluate_pose_sequence(const std::vector<JointRotations>& pred,
                                       const std::vector<JointRotations>& gt,
                                       const Skeleton& skel);

struct TranslationErrorCurve {
    double bin_m = 1.0;
    std::vector<double> mean_err_m;  // entry k = mean error after traveling k * bin_m
    std::vector<long> counts;
};

/// Mean translation error as a function of ground-truth distance traveled.
/// Every window start re-anchors both trajectories, then the error is read
/// off where the ground-truth arc length first reaches each bin distance.
TranslationErrorCurve cumulative_translation_error(const std::vector<Vec3>& pred,
                                                   const std::vector<Vec3>& gt,
                                                   double bin_m = 1.0,
                                                   int window_stride = 1);

/// Tab-separated report table. Mesh error is not computable without a body
/// surface model and is reported as "n/a", never substituted.
std::string format_report(const PoseErrorReport& report);

}  // namespace baromocap
