#include "baromocap/feature_builder.hpp"

#include "baromocap/errors.hpp"

namespace baromocap {

namespace {

// Column-major 3x3 block helpers; the layout is load-bearing for trained
// weights (kFeatureLayoutVersion).
void put_mat3(Eigen::Ref<Eigen::VectorXd> dst, int at, const Mat3& m) {
    dst.segment<9>(at) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(m.data());
}

Mat3 get_mat3(const Eigen::Ref<const Eigen::VectorXd>& src, int at) {
    return Eigen::Map<const Mat3>(src.segment<9>(at).eval().data());
}

}  // namespace

PoseFeature PoseInput::flatten() const {
    PoseFeature v;
    v.segment<3>(0) = a_lw_local;
    v.segment<3>(3) = a_rp_local;
    put_mat3(v, 6, r_lw_local.m);
    v.segment<3>(15) = w_rp_local;
    v.segment<3>(18) = g_local;
    v[21] = dh;
    return v;
}

PoseInput PoseInput::unflatten(const PoseFeature& v) {
    PoseInput in;
    in.a_lw_local = v.segment<3>(0);
    in.a_rp_local = v.segment<3>(3);
    in.r_lw_local = Rot3{get_mat3(v, 6)};
    in.w_rp_local = v.segment<3>(15);
    in.g_local = v.segment<3>(18);
    in.dh = v[21];
    return in;
}

TransFeature TransInput::flatten() const {
    TransFeature v;
    v.segment<3>(0) = a_lw;
    v.segment<3>(3) = a_rp;
    put_mat3(v, 6, r_lw.m);
    put_mat3(v, 15, r_rp.m);
    v[24] = dh;
    return v;
}

TransInput TransInput::unflatten(const TransFeature& v) {
    TransInput in;
    in.a_lw = v.segment<3>(0);
    in.a_rp = v.segment<3>(3);
    in.r_lw = Rot3{get_mat3(v, 6)};
    in.r_rp = Rot3{get_mat3(v, 15)};
    in.dh = v[24];
    return in;
}

PoseInput build_pose_input(const RawFrame& curr, const RawFrame& prev, double dt) {
    const Mat3 rp_t = curr.r_rp.m.transpose();
    PoseInput in;
    in.a_lw_local = rp_t * curr.a_lw;
    in.a_rp_local = rp_t * curr.a_rp;
    in.r_lw_local = Rot3{rp_t * curr.r_lw.m};
    in.w_rp_local = log_so3(Rot3{prev.r_rp.m.transpose() * curr.r_rp.m}) / dt;
    in.g_local = rp_t * kGravityDir;
    in.dh = curr.h_lw - curr.h_rp;
    return in;
}

TransInput build_trans_input(const RawFrame& curr) {
    TransInput in;
    in.a_lw = curr.a_lw;
    in.a_rp = curr.a_rp;
    in.r_lw = curr.r_lw;
    in.r_rp = curr.r_rp;
    in.dh = curr.h_lw - curr.h_rp;
    return in;
}

JointRotations localize_pose_output(const JointRotations& theta_local, const Rot3& r_rp) {
    JointRotations world = theta_local;
    world[0] = Rot3{r_rp.m * theta_local[0].m};
    return world;
}

JointRotations delocalize_pose(const JointRotations& theta_world, const Rot3& r_rp) {
    JointRotations local = theta_world;
    local[0] = Rot3{r_rp.m.transpose() * theta_world[0].m};
    return local;
}

PoseVector flatten_pose_6d(const JointRotations& theta) {
    PoseVector v;
    for (int j = 0; j < kNumJoints; ++j) {
        v.segment<6>(j * 6) = encode_rot6d(theta[static_cast<size_t>(j)]);
    }
    return v;
}

JointRotations unflatten_pose_6d(const PoseVector& v) {
    JointRotations theta;
    for (int j = 0; j < kNumJoints; ++j) {
        theta[static_cast<size_t>(j)] = decode_rot6d(v.segment<6>(j * 6));
    }
    return theta;
}

}  // namespace baromocap
