#include <doctest.h>

#include <numbers>
#include <random>

#include "baromocap/rotmath.hpp"
#include "support/quat_oracle.hpp"

using namespace baromocap;
constexpr double kPi = std::numbers::pi;

namespace {
double max_abs_diff(const Mat3& a, const Mat3& b) {
    return (a - b).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_SUITE("rotmath") {

TEST_CASE("log of identity is zero") {
    CHECK(log_so3(Rot3::identity()).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("log of quarter turn about z") {
    const Vec3 v = log_so3(Rot3::about_z(kPi / 2));
    CHECK(v.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v.y() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v.z() == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("exp of zero is identity") {
    CHECK(max_abs_diff(exp_so3(Vec3::Zero()).m, Mat3::Identity()) < 1e-15);
}

TEST_CASE("exp of half turn about z") {
    Mat3 expected;
    expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
    CHECK(max_abs_diff(exp_so3(Vec3(0, 0, kPi)).m, expected) < 1e-12);
}

TEST_CASE("exp/log round-trip against the quaternion oracle") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const oracle::Quat q = oracle::random_quat(rng);
        const Rot3 r{oracle::to_matrix(q)};
        const Rot3 back = exp_so3(log_so3(r));
        CHECK(max_abs_diff(back.m, r.m) < 1e-6);
        // The axis-angle itself must match the oracle's (magnitude in [0, pi]).
        const Vec3 ours = log_so3(r);
        const Vec3 theirs = oracle::to_axis_angle(q);
        CHECK(ours.norm() <= kPi + 1e-12);
        if (ours.norm() < kPi - 1e-6) {
            CHECK((ours - theirs).norm() < 1e-6);
        }
    }
}

TEST_CASE("log inverts exp on the open ball") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        Vec3 v(u(rng), u(rng), u(rng));
        v = v.normalized() * (std::abs(u(rng)) * (kPi - 1e-6));
        CHECK((log_so3(exp_so3(v)) - v).norm() < 1e-6);
    }
}

TEST_CASE("near-pi branch stays accurate") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        Vec3 axis(u(rng), u(rng), u(rng));
        axis.normalize();
        const double theta = kPi - std::abs(u(rng)) * 1e-3;
        const Rot3 r = exp_so3(axis * theta);
        CHECK(max_abs_diff(exp_so3(log_so3(r)).m, r.m) < 1e-6);
    }
    // Exactly pi: log magnitude is pi and exp reconstructs.
    const Rot3 r = exp_so3(Vec3(0.36, -0.48, 0.8).normalized() * kPi);
    const Vec3 v = log_so3(r);
    CHECK(v.norm() == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(max_abs_diff(exp_so3(v).m, r.m) < 1e-9);
}

TEST_CASE("rot6d decode of trivial inputs") {
    Vec6 v;
    v << 1, 0, 0, 0, 1, 0;
    CHECK(max_abs_diff(decode_rot6d(v).m, Mat3::Identity()) < 1e-12);
    // Scaling and in-plane shear are removed by the orthogonalization.
    v << 2, 0, 0, 1, 1, 0;
    CHECK(max_abs_diff(decode_rot6d(v).m, Mat3::Identity()) < 1e-12);
}

TEST_CASE("rot6d encode of trivial inputs") {
    Vec6 id = encode_rot6d(Rot3::identity());
    Vec6 expected;
    expected << 1, 0, 0, 0, 1, 0;
    CHECK((id - expected).norm() < 1e-15);

    Mat3 half;
    half << -1, 0, 0, 0, -1, 0, 0, 0, 1;
    expected << -1, 0, 0, 0, -1, 0;
    CHECK((encode_rot6d(Rot3{half}) - expected).norm() < 1e-15);
}

TEST_CASE("rot6d round-trip and determinant") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 1000; ++i) {
        const Rot3 r{oracle::random_rotation_matrix(rng)};
        const Rot3 back = decode_rot6d(encode_rot6d(r));
        CHECK(max_abs_diff(back.m, r.m) < 1e-6);
        CHECK(back.m.determinant() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("rot6d decode is invariant to positive scaling of each triple") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const Rot3 r{oracle::random_rotation_matrix(rng)};
        Vec6 v = encode_rot6d(r);
        Vec6 scaled = v;
        scaled.head<3>() *= scale(rng);
        scaled.tail<3>() *= scale(rng);
        CHECK(max_abs_diff(decode_rot6d(scaled).m, decode_rot6d(v).m) < 1e-6);
    }
}

TEST_CASE("rot6d decode rejects degenerate input") {
    Vec6 zero_first;
    zero_first << 0, 0, 0, 0, 1, 0;
    CHECK_THROWS_AS(decode_rot6d(zero_first), DegenerateInput);

    Vec6 parallel;
    parallel << 1, 0, 0, 2, 0, 0;
    CHECK_THROWS_AS(decode_rot6d(parallel), DegenerateInput);
}

TEST_CASE("geodesic angle matches the quaternion oracle") {
    std::mt19937_64 rng(16);
    for (int i = 0; i < 300; ++i) {
        const oracle::Quat qa = oracle::random_quat(rng);
        const oracle::Quat qb = oracle::random_quat(rng);
        const double ours = geodesic_angle(Rot3{oracle::to_matrix(qa)}, Rot3{oracle::to_matrix(qb)});
        CHECK(ours == doctest::Approx(oracle::angle_between(qa, qb)).epsilon(1e-6));
    }
}

TEST_CASE("geodesic interpolation matches slerp") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const oracle::Quat qa = oracle::random_quat(rng);
        const oracle::Quat qb = oracle::random_quat(rng);
        const double t = u01(rng);
        const Rot3 ours =
            geodesic_interp(Rot3{oracle::to_matrix(qa)}, Rot3{oracle::to_matrix(qb)}, t);
        CHECK(max_abs_diff(ours.m, oracle::to_matrix(oracle::slerp(qa, qb, t))) < 1e-6);
    }
}

TEST_CASE("mean of clustered rotations") {
    std::mt19937_64 rng(18);
    std::normal_distribution<double> g(0.0, 0.02);
    const Rot3 center{oracle::random_rotation_matrix(rng)};
    std::vector<Rot3> rs;
    for (int i = 0; i < 100; ++i) {
        rs.push_back(Rot3{center.m * exp_so3(Vec3(g(rng), g(rng), g(rng))).m});
    }
    CHECK(geodesic_angle(mean_rotation(rs), center) < 0.01);
}

}  // TEST_SUITE
