#include "baromocap/rotmath.hpp"

#include <cmath>
#include <vector>

namespace baromocap {

namespace {

Vec3 vee(const Mat3& m) {
    return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

// Axis from R + R^T when sin(theta) is too small to trust. a_i^2 follows
// from the diagonal of K^2 = (R + R^T - 2I) / (2(1 - cos)), off-diagonals
// fix the remaining components relative to the largest one.
Vec3 axis_near_pi(const Mat3& m, double cos_theta) {
    const double one_minus_c = 1.0 - cos_theta;
    Vec3 a;
    int k = 0;
    double best = m(0, 0);
    for (int i = 1; i < 3; ++i) {
        if (m(i, i) > best) {
            best = m(i, i);
            k = i;
        }
    }
    const double ak2 = 1.0 + (m(k, k) - 1.0) / one_minus_c;
    a[k] = std::sqrt(std::max(ak2, 0.0));
    for (int j = 0; j < 3; ++j) {
        if (j == k) continue;
        a[j] = (m(k, j) + m(j, k)) / (2.0 * one_minus_c * a[k]);
    }
    a.normalize();

    // Keep the branch continuous with theta < pi: sin(theta) a must agree
    // with vee(R - R^T)/2 whenever that signal is above noise.
    const Vec3 w = vee(m);
    if (w.norm() > 1e-9) {
        if (a.dot(w) < 0.0) a = -a;
    } else {
        // theta == pi exactly: both signs valid, pick a deterministic one.
        for (int i = 0; i < 3; ++i) {
            if (std::abs(a[i]) > 1e-9) {
                if (a[i] < 0.0) a = -a;
                break;
            }
        }
    }
    return a;
}

}  // namespace

Rot3 Rot3::about_x(double t) {
    Mat3 m;
    m << 1, 0, 0,
        0, std::cos(t), -std::sin(t),
        0, std::sin(t), std::cos(t);
    return Rot3{m};
}

Rot3 Rot3::about_y(double t) {
    Mat3 m;
    m << std::cos(t), 0, std::sin(t),
        0, 1, 0,
        -std::sin(t), 0, std::cos(t);
    return Rot3{m};
}

Rot3 Rot3::about_z(double t) {
    Mat3 m;
    m << std::cos(t), -std::sin(t), 0,
        std::sin(t), std::cos(t), 0,
        0, 0, 1;
    return Rot3{m};
}

bool Rot3::is_valid(double tol) const {
    if (!m.allFinite()) return false;
    const Mat3 should_be_identity = m.transpose() * m;
    if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(m.determinant() - 1.0) <= tol;
}

Vec3 log_so3(const Rot3& r) {
    const Mat3& m = r.m;
    const double cos_theta = std::min(1.0, std::max(-1.0, (m.trace() - 1.0) * 0.5));
    const Vec3 w = vee(m);            // 2 sin(theta) * axis
    const double sin_theta = 0.5 * w.norm();
    const double theta = std::atan2(sin_theta, cos_theta);

    if (cos_theta < -0.9999) {
        return theta * axis_near_pi(m, cos_theta);
    }
    if (theta < 1e-8) {
        return 0.5 * w;
    }
    return (theta / (2.0 * sin_theta)) * w;
}

Rot3 exp_so3(const Vec3& v) {
    const double theta = v.norm();
    const Mat3 w = skew(v);
    double a;  // sin(t)/t
    double b;  // (1 - cos(t))/t^2
    if (theta < 1e-8) {
        const double t2 = theta * theta;
        a = 1.0 - t2 / 6.0;
        b = 0.5 - t2 / 24.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / (theta * theta);
    }
    return Rot3{Mat3::Identity() + a * w + b * (w * w)};
}

Vec6 encode_rot6d(const Rot3& r) {
    Vec6 out;
    out << r.m(0, 0), r.m(1, 0), r.m(2, 0), r.m(0, 1), r.m(1, 1), r.m(2, 1);
    return out;
}

Rot3 decode_rot6d(const Vec6& r) {
    const Vec3 a = r.head<3>();
    const double na = a.norm();
    if (na < 1e-9) throw DegenerateInput("rot6d first triple has near-zero norm");
    const Vec3 col1 = a / na;

    const Vec3 c = col1.cross(Vec3(r.tail<3>()));
    const double nc = c.norm();
    if (nc < 1e-9) throw DegenerateInput("rot6d triples are near-parallel");
    const Vec3 col3 = c / nc;
    const Vec3 col2 = col3.cross(col1);

    Mat3 m;
    m.col(0) = col1;
    m.col(1) = col2;
    m.col(2) = col3;
    return Rot3{m};
}

double geodesic_angle(const Rot3& a, const Rot3& b) {
    return log_so3(Rot3{a.m.transpose() * b.m}).norm();
}

Rot3 geodesic_interp(const Rot3& a, const Rot3& b, double t) {
    return Rot3{a.m * exp_so3(t * log_so3(Rot3{a.m.transpose() * b.m})).m};
}

Rot3 mean_rotation(const std::vector<Rot3>& rs) {
    if (rs.empty()) throw DegenerateInput("mean_rotation of empty set");
    Rot3 mean = rs.front();
    for (int iter = 0; iter < 8; ++iter) {
        Vec3 acc = Vec3::Zero();
        for (const Rot3& r : rs) {
            acc += log_so3(Rot3{mean.m.transpose() * r.m});
        }
        acc /= static_cast<double>(rs.size());
        mean = Rot3{mean.m * exp_so3(acc).m};
        if (acc.norm() < 1e-12) break;
    }
    return mean;
}

}  // namespace baromocap
