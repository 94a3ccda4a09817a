#pragma once

#include <vector>

#include "baromocap/skeleton.hpp"

namespace baromocap {

struct FkResult {
    std::array<Vec3, kNumJoints> positions;      // pelvis at origin
    std::array<Rot3, kNumJoints> orientations;   // global bone orientations
    Vec3 wrist_site = Vec3::Zero();
    Vec3 thigh_site = Vec3::Zero();
    Vec3 left_foot_site = Vec3::Zero();
    Vec3 right_foot_site = Vec3::Zero();
};

/// Chain composition over the joint hierarchy. theta[0] is the pelvis
/// orientation applied to the whole body; positions are pelvis-relative.
FkResult fk(const JointRotations& theta, const Skeleton& skel);

/// Global bone orientations only (pelvis world orientation composed down
/// the chain); used by the rotation metrics.
std::array<Rot3, kNumJoints> global_orientations(const JointRotations& theta,
                                                 const Skeleton& skel);

/// Vertical (y) coordinate of the right-thigh sensor site with the pelvis
/// at the origin, i.e. thigh height relative to the root.
double thigh_local_height(const JointRotations& theta, const Skeleton& skel);

/// Root vertical translation: global height change minus the part explained
/// by the pose's own thigh motion.
inline double vertical_translation(double h_glb_t, double h_glb_0, double h_loc_t,
                                   double h_loc_0) {
    return (h_glb_t - h_glb_0) - (h_loc_t - h_loc_0);
}

/// Cumulative sum of v*dt starting from the origin; entry i includes v[i].
std::vector<Vec2> integrate_horizontal(const std::vector<Vec2>& v_seq, double dt);

struct MotionState {
    JointRotations theta;  // world pose: pelvis world orientation + parent-relative
    Vec2 t_xz = Vec2::Zero();
    double t_y = 0.0;
    double t = 0.0;  // seconds
};

/// Fold the estimator outputs into the final motion stream: world pose from
/// the thigh-local pose, horizontal translation by velocity integration,
/// vertical translation from pose-corrected global height.
std::vector<MotionState> assemble(const std::vector<JointRotations>& theta_local_seq,
                                  const std::vector<Rot3>& r_rp_seq,
                                  const std::vector<Vec2>& v_seq,
                                  const std::vector<double>& h_glb_seq,
                                  const Skeleton& skel, double dt);

}  // namespace baromocap
