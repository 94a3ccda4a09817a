#pragma once

// Independent quaternion reference used only by tests. Deliberately avoids
// the library's rotation code so round-trip checks have a second route.

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace oracle {

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

inline double norm(const Quat& q) {
    return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

inline Quat normalized(const Quat& q) {
    const double n = norm(q);
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

inline Quat conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline Quat mul(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat from_axis_angle(const Eigen::Vector3d& v) {
    const double theta = v.norm();
    if (theta < 1e-12) return {1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z()};
    const Eigen::Vector3d axis = v / theta;
    const double s = std::sin(0.5 * theta);
    return {std::cos(0.5 * theta), s * axis.x(), s * axis.y(), s * axis.z()};
}

inline Eigen::Vector3d to_axis_angle(const Quat& q_in) {
    Quat q = normalized(q_in);
    if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
    const double s = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    const double theta = 2.0 * std::atan2(s, q.w);
    if (s < 1e-12) return {2.0 * q.x, 2.0 * q.y, 2.0 * q.z};
    return Eigen::Vector3d(q.x, q.y, q.z) * (theta / s);
}

inline Eigen::Matrix3d to_matrix(const Quat& q) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    Eigen::Matrix3d m;
    m << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
    return m;
}

inline double angle_between(const Quat& a, const Quat& b) {
    const Quat d = mul(conjugate(a), b);
    const double s = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    return 2.0 * std::atan2(s, std::abs(d.w));
}

inline Quat slerp(const Quat& a, const Quat& b_in, double t) {
    Quat b = b_in;
    double dot = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    if (dot < 0.0) {
        b = {-b.w, -b.x, -b.y, -b.z};
        dot = -dot;
    }
    if (dot > 0.9995) {
        Quat out{a.w + t * (b.w - a.w), a.x + t * (b.x - a.x), a.y + t * (b.y - a.y),
                 a.z + t * (b.z - a.z)};
        return normalized(out);
    }
    const double theta = std::acos(dot);
    const double sa = std::sin((1.0 - t) * theta) / std::sin(theta);
    const double sb = std::sin(t * theta) / std::sin(theta);
    return {sa * a.w + sb * b.w, sa * a.x + sb * b.x, sa * a.y + sb * b.y,
            sa * a.z + sb * b.z};
}

template <class Rng>
Quat random_quat(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return normalized({g(rng), g(rng), g(rng), g(rng)});
}

template <class Rng>
Eigen::Matrix3d random_rotation_matrix(Rng& rng) {
    return to_matrix(random_quat(rng));
}

}  // namespace oracle
