#pragma once

#include <Eigen/Dense>

#include "baromocap/errors.hpp"

namespace baromocap {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Proper rotation matrix (orthonormal, det +1). Construction does not
/// validate; call is_valid() where an invariant check is wanted.
struct Rot3 {
    Mat3 m = Mat3::Identity();

    Rot3() = default;
    explicit Rot3(const Mat3& mat) : m(mat) {}

    static Rot3 identity() { return Rot3{}; }
    static Rot3 about_x(double angle_rad);
    static Rot3 about_y(double angle_rad);
    static Rot3 about_z(double angle_rad);

    Rot3 operator*(const Rot3& rhs) const { return Rot3{m * rhs.m}; }
    Vec3 operator*(const Vec3& v) const { return m * v; }
    Rot3 transpose() const { return Rot3{m.transpose()}; }

    bool is_valid(double tol = 1e-6) const;
    bool approx(const Rot3& other, double tol = 1e-9) const {
        return (m - other.m).cwiseAbs().maxCoeff() <= tol;
    }
};

/// Axis-angle vector of r with magnitude in [0, pi]. Stable near the pi
/// branch via largest-diagonal axis extraction (accuracy there >= 1e-5).
Vec3 log_so3(const Rot3& r);

/// Rodrigues formula; switches to a series expansion below ||v|| = 1e-8.
Rot3 exp_so3(const Vec3& v);

/// First two columns of the rotation matrix, column-major:
/// (m00 m10 m20 | m01 m11 m21).
Vec6 encode_rot6d(const Rot3& r);

/// Gram-Schmidt decode: col1 = normalize(r[0:3]), col3 = normalize(col1 x
/// r[3:6]), col2 = col3 x col1. Throws DegenerateInput when either
/// normalization sees a norm below 1e-9.
Rot3 decode_rot6d(const Vec6& r);

/// Geodesic distance between two rotations in radians, in [0, pi].
double geodesic_angle(const Rot3& a, const Rot3& b);

/// Point at parameter t along the geodesic from a (t=0) to b (t=1).
Rot3 geodesic_interp(const Rot3& a, const Rot3& b, double t);

/// Intrinsic mean of a nonempty set of rotations (iterated tangent-space
/// averaging). Intended for tightly clustered inputs such as a calibration
/// window.
Rot3 mean_rotation(const std::vector<Rot3>& rs);

inline Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0, -v.z(), v.y(),
        v.z(), 0, -v.x(),
        -v.y(), v.x(), 0;
    return s;
}

}  // namespace baromocap
