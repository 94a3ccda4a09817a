#pragma once

#include <array>
#include <string>
#include <vector>

#include "baromocap/rotmath.hpp"

namespace baromocap {

inline constexpr int kNumJoints = 24;

/// Joint rotation set for one frame: index 0 is the pelvis orientation in
/// the world (or thigh-local) frame, all other entries are parent-relative.
using JointRotations = std::array<Rot3, kNumJoints>;

struct Joint {
    std::string name;
    int parent = -1;  // -1 for the root only
    Vec3 offset = Vec3::Zero();  // rest offset from parent, meters
};

/// 24-joint mean-shape skeleton, topologically sorted (parent < index).
/// Rest pose is a T-pose: y up, subject facing -z, left side on -x.
/// Sensor sites: left-wrist joint and a configurable fraction along the
/// right hip->knee bone (a phone in a trouser pocket sits mid-thigh).
class Skeleton {
public:
    static Skeleton mean_shape();
    static Skeleton load(const std::string& path);
    void save(const std::string& path) const;

    int joint_count() const { return static_cast<int>(joints_.size()); }
    const Joint& joint(int i) const { return joints_[static_cast<size_t>(i)]; }
    int index_of(const std::string& name) const;  // -1 when absent

    int left_wrist() const { return left_wrist_; }
    int right_hip() const { return right_hip_; }
    int right_knee() const { return right_knee_; }
    int left_foot() const { return left_foot_; }
    int right_foot() const { return right_foot_; }
    double thigh_site_fraction() const { return thigh_site_fraction_; }
    void set_thigh_site_fraction(double f) { thigh_site_fraction_ = f; }

private:
    std::vector<Joint> joints_;
    int left_wrist_ = -1;
    int right_hip_ = -1;
    int right_knee_ = -1;
    int left_foot_ = -1;
    int right_foot_ = -1;
    double thigh_site_fraction_ = 0.5;

    void resolve_sites();
    void validate() const;
};

}  // namespace baromocap
