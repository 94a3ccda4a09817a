#include "baromocap/kinematics.hpp"

#include "baromocap/errors.hpp"
#include "baromocap/feature_builder.hpp"

namespace baromocap {

FkResult fk(const JointRotations& theta, const Skeleton& skel) {
    FkResult out;
    out.orientations[0] = theta[0];
    out.positions[0] = Vec3::Zero();
    for (int j = 1; j < skel.joint_count(); ++j) {
        const Joint& joint = skel.joint(j);
        const auto p = static_cast<size_t>(joint.parent);
        const auto i = static_cast<size_t>(j);
        out.orientations[i] = Rot3{out.orientations[p].m * theta[i].m};
        out.positions[i] = out.positions[p] + out.orientations[p].m * joint.offset;
    }
    out.wrist_site = out.positions[static_cast<size_t>(skel.left_wrist())];
    const auto hip = static_cast<size_t>(skel.right_hip());
    out.thigh_site = out.positions[hip] +
                     out.orientations[hip].m *
                         (skel.thigh_site_fraction() * skel.joint(skel.right_knee()).offset);
    out.left_foot_site = out.positions[static_cast<size_t>(skel.left_foot())];
    out.right_foot_site = out.positions[static_cast<size_t>(skel.right_foot())];
    return out;
}

std::array<Rot3, kNumJoints> global_orientations(const JointRotations& theta,
                                                 const Skeleton& skel) {
    std::array<Rot3, kNumJoints> global;
    global[0] = theta[0];
    for (int j = 1; j < skel.joint_count(); ++j) {
        const auto p = static_cast<size_t>(skel.joint(j).parent);
        global[static_cast<size_t>(j)] = Rot3{global[p].m * theta[static_cast<size_t>(j)].m};
    }
    return global;
}

double thigh_local_height(const JointRotations& theta, const Skeleton& skel) {
    return fk(theta, skel).thigh_site.y();
}

std::vector<Vec2> integrate_horizontal(const std::vector<Vec2>& v_seq, double dt) {
    std::vector<Vec2> t_xz;
    t_xz.reserve(v_seq.size());
    Vec2 acc = Vec2::Zero();
    for (const Vec2& v : v_seq) {
        acc += v * dt;
        t_xz.push_back(acc);
    }
    return t_xz;
}

std::vector<MotionState> assemble(const std::vector<JointRotations>& theta_local_seq,
                                  const std::vector<Rot3>& r_rp_seq,
                                  const std::vector<Vec2>& v_seq,
                                  const std::vector<double>& h_glb_seq,
                                  const Skeleton& skel, double dt) {
    const size_t n = theta_local_seq.size();
    if (r_rp_seq.size() != n || v_seq.size() != n || h_glb_seq.size() != n) {
        throw LengthMismatch("assemble: sequence lengths differ");
    }
    std::vector<MotionState> out;
    out.reserve(n);
    Vec2 t_xz = Vec2::Zero();
    double h_loc_0 = 0.0;
    double h_glb_0 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        MotionState s;
        s.theta = localize_pose_output(theta_local_seq[i], r_rp_seq[i]);
        const double h_loc = thigh_local_height(s.theta, skel);
        if (i == 0) {
            h_loc_0 = h_loc;
            h_glb_0 = h_glb_seq[0];
        }
        t_xz += v_seq[i] * dt;
        s.t_xz = t_xz;
        s.t_y = vertical_translation(h_glb_seq[i], h_glb_0, h_loc, h_loc_0);
        s.t = static_cast<double>(i) * dt;
        out.push_back(s);
    }
    return out;
}

}  // namespace baromocap
