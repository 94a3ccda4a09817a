#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "baromocap/kinematics.hpp"
#include "baromocap/synth_data.hpp"
#include "support/quat_oracle.hpp"

using namespace baromocap;
constexpr double kPi = std::numbers::pi;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

MotionClip root_trajectory_clip(const std::vector<Vec3>& roots, double fps) {
    MotionClip clip;
    clip.fps = fps;
    for (const Vec3& r : roots) {
        ClipFrame f;
        f.root = r;
        clip.frames.push_back(f);
    }
    return clip;
}

}  // namespace

TEST_SUITE("synth_data") {

TEST_CASE("resample at the same rate is the identity") {
    const Skeleton skel = Skeleton::mean_shape();
    const MotionClip clip = make_walk(skel, 2.0, 30.0, 1.0, 0.9, 0.3);
    const MotionClip out = resample(clip, 30.0);
    REQUIRE(out.frames.size() == clip.frames.size());
    for (size_t i = 0; i < out.frames.size(); ++i) {
        CHECK((out.frames[i].root - clip.frames[i].root).norm() == 0.0);
        for (int j = 0; j < kNumJoints; ++j) {
            CHECK((out.frames[i].pose[static_cast<size_t>(j)].m -
                   clip.frames[i].pose[static_cast<size_t>(j)].m)
                      .norm() == 0.0);
        }
    }
}

TEST_CASE("downsampling 60 to 30 keeps alternate frames of a linear root") {
    std::vector<Vec3> roots;
    for (int i = 0; i < 61; ++i) roots.emplace_back(0.02 * i, 1.0, -0.01 * i);
    const MotionClip out = resample(root_trajectory_clip(roots, 60.0), 30.0);
    REQUIRE(out.frames.size() == 31);
    for (size_t i = 0; i < out.frames.size(); ++i) {
        CHECK((out.frames[i].root - roots[2 * i]).norm() < 1e-12);
    }
}

TEST_CASE("25 to 30 interpolation matches the slerp oracle") {
    std::mt19937_64 rng(51);
    MotionClip clip;
    clip.fps = 25.0;
    std::vector<oracle::Quat> quats;
    for (int i = 0; i < 26; ++i) {
        ClipFrame f;
        const oracle::Quat q = oracle::random_quat(rng);
        quats.push_back(q);
        f.pose[0] = Rot3{oracle::to_matrix(q)};
        f.root = Vec3(0.1 * i, 1.0, 0.0);
        clip.frames.push_back(f);
    }
    const MotionClip out = resample(clip, 30.0);
    for (size_t j = 0; j < out.frames.size(); ++j) {
        CHECK(out.frames[j].pose[0].is_valid(1e-9));
        const double pos = (static_cast<double>(j) / 30.0) * 25.0;
        const auto i = std::min(static_cast<size_t>(pos), quats.size() - 2);
        const double u = pos - static_cast<double>(i);
        const Mat3 expected = oracle::to_matrix(oracle::slerp(quats[i], quats[i + 1], u));
        CHECK((out.frames[j].pose[0].m - expected).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("synth_imu of a static clip is zero acceleration") {
    const Skeleton skel = Skeleton::mean_shape();
    const auto imu = synth_imu(make_tpose_hold(skel, 1.0, 30.0), skel);
    for (const ImuSample& s : imu) {
        CHECK(s.a_lw.norm() == 0.0);
        CHECK(s.a_rp.norm() == 0.0);
        CHECK((s.r_lw.m - imu.front().r_lw.m).norm() == 0.0);
    }
}

TEST_CASE("synth_imu recovers a constant acceleration exactly") {
    const Vec3 c(0.3, 0.2, -0.1);
    std::vector<Vec3> roots;
    const double dt = 1.0 / 30.0;
    for (int i = 0; i < 40; ++i) {
        const double t = i * dt;
        roots.push_back(0.5 * c * t * t + Vec3(0, 1, 0));
    }
    const Skeleton skel = Skeleton::mean_shape();
    const auto imu = synth_imu(root_trajectory_clip(roots, 30.0), skel);
    for (size_t i = 1; i + 1 < imu.size(); ++i) {
        CHECK((imu[i].a_rp - c).norm() < 1e-9);
    }
    CHECK((imu.front().a_rp - imu[1].a_rp).norm() == 0.0);  // endpoint replication
    CHECK((imu.back().a_rp - imu[imu.size() - 2].a_rp).norm() == 0.0);
}

TEST_CASE("synth_imu matches the sinc-corrected sinusoid amplitude") {
    const double amp = 0.2;
    const double omega = 2.0 * kPi * 2.0;  // 2 Hz
    const double dt = 1.0 / 30.0;
    std::vector<Vec3> roots;
    for (int i = 0; i < 90; ++i) {
        roots.emplace_back(amp * std::sin(omega * i * dt), 1.0, 0.0);
    }
    const Skeleton skel = Skeleton::mean_shape();
    const auto imu = synth_imu(root_trajectory_clip(roots, 30.0), skel);
    const double half = 0.5 * omega * dt;
    const double sinc = std::sin(half) / half;
    const double expected_amp = amp * omega * omega * sinc * sinc;
    for (size_t i = 1; i + 1 < imu.size(); ++i) {
        const double expected = -expected_amp * std::sin(omega * static_cast<double>(i) * dt);
        CHECK(imu[i].a_rp.x() == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(std::abs(expected_amp - amp * omega * omega) / (amp * omega * omega) < 0.02);
}

TEST_CASE("synth_imu rejects too-short clips") {
    const Skeleton skel = Skeleton::mean_shape();
    MotionClip clip;
    clip.fps = 30.0;
    clip.frames.resize(2);
    CHECK_THROWS_AS(synth_imu(clip, skel), TooShort);
}

TEST_CASE("per-frame single-step reconstruction from synthetic accelerations") {
    const Skeleton skel = Skeleton::mean_shape();
    const double dt = 1.0 / 30.0;
    for (const MotionClip& clip : {make_squat(skel, 6.0, 30.0, 0.25, 4.0),
                                   make_walk(skel, 6.0, 30.0, 1.2, 0.9, 0.0)}) {
        const auto imu = synth_imu(clip, skel);
        std::vector<Vec3> p(clip.frames.size());
        for (size_t i = 0; i < clip.frames.size(); ++i) {
            p[i] = clip.frames[i].root + fk(clip.frames[i].pose, skel).wrist_site;
        }
        // Trapezoid double integration, drift-corrected against the true
        // position and central-difference velocity every frame.
        for (size_t i = 1; i + 2 < p.size(); ++i) {
            const Vec3 v_true = (p[i + 1] - p[i - 1]) / (2.0 * dt);
            const Vec3 v_next = v_true + 0.5 * (imu[i].a_lw + imu[i + 1].a_lw) * dt;
            const Vec3 p_next = p[i] + 0.5 * (v_true + v_next) * dt;
            CHECK((p_next - p[i + 1]).norm() < 1e-3);
        }
    }
}

TEST_CASE("synth_heights references the first-frame ground") {
    const Skeleton skel = Skeleton::mean_shape();
    const MotionClip clip = make_tpose_hold(skel, 1.0, 30.0);
    const auto heights = synth_heights(clip, skel, 0.0, 0);

    const FkResult rest = fk(clip.frames[0].pose, skel);
    const double ground = std::min(rest.left_foot_site.y(), rest.right_foot_site.y()) +
                          clip.frames[0].root.y();
    CHECK(ground == doctest::Approx(0.0).epsilon(1e-12));  // standing start
    const double thigh_abs = rest.thigh_site.y() + clip.frames[0].root.y();
    const double wrist_abs = rest.wrist_site.y() + clip.frames[0].root.y();
    for (const HeightPair& h : heights) {
        CHECK(h.h_rp == doctest::Approx(thigh_abs - ground).epsilon(1e-12));
        CHECK(h.h_lw == doctest::Approx(wrist_abs - ground).epsilon(1e-12));
    }
}

TEST_CASE("height noise statistics and device independence") {
    const Skeleton skel = Skeleton::mean_shape();
    MotionClip clip;
    clip.fps = 30.0;
    const int n = 100000;
    clip.frames.resize(n);
    const double stand = standing_root_height(skel);
    for (ClipFrame& f : clip.frames) f.root = Vec3(0, stand, 0);

    const auto clean = synth_heights(clip, skel, 0.0, 0);
    const auto noisy = synth_heights(clip, skel, 0.05, 99);
    double mean_w = 0.0;
    double mean_p = 0.0;
    for (int i = 0; i < n; ++i) {
        mean_w += noisy[i].h_lw - clean[i].h_lw;
        mean_p += noisy[i].h_rp - clean[i].h_rp;
    }
    mean_w /= n;
    mean_p /= n;
    CHECK(std::abs(mean_w) < 0.002);
    CHECK(std::abs(mean_p) < 0.002);

    double var_w = 0.0;
    double var_p = 0.0;
    double cov = 0.0;
    for (int i = 0; i < n; ++i) {
        const double nw = noisy[i].h_lw - clean[i].h_lw - mean_w;
        const double np = noisy[i].h_rp - clean[i].h_rp - mean_p;
        var_w += nw * nw;
        var_p += np * np;
        cov += nw * np;
    }
    const double std_w = std::sqrt(var_w / n);
    const double std_p = std::sqrt(var_p / n);
    CHECK(std::abs(std_w - 0.05) / 0.05 < 0.05);
    CHECK(std::abs(std_p - 0.05) / 0.05 < 0.05);
    const double corr = (cov / n) / (std_w * std_p);
    CHECK(std::abs(corr) < 0.05);

    // Reproducible per seed.
    const auto replay = synth_heights(clip, skel, 0.05, 99);
    for (int i = 0; i < 100; ++i) {
        CHECK(replay[static_cast<size_t>(i)].h_lw == noisy[static_cast<size_t>(i)].h_lw);
    }
}

TEST_CASE("ground_truth_velocity basics and telescoping") {
    SUBCASE("static clip gives zeros") {
        std::vector<Vec3> roots(20, Vec3(0, 1, 0));
        for (const Vec2& v : ground_truth_velocity(root_trajectory_clip(roots, 30.0))) {
            CHECK(v.norm() == 0.0);
        }
    }
    SUBCASE("constant root velocity gives a constant sequence") {
        std::vector<Vec3> roots;
        for (int i = 0; i < 31; ++i) roots.emplace_back(i / 30.0, 1.0, 0.0);
        const auto v = ground_truth_velocity(root_trajectory_clip(roots, 30.0));
        REQUIRE(v.size() == 30);
        for (const Vec2& vi : v) CHECK((vi - Vec2(1.0, 0.0)).norm() < 1e-9);
    }
    SUBCASE("sum of v*dt telescopes to the total displacement") {
        std::mt19937_64 rng(52);
        std::normal_distribution<double> g(0.0, 0.1);
        std::vector<Vec3> roots(1, Vec3::Zero());
        for (int i = 0; i < 200; ++i) {
            roots.push_back(roots.back() + Vec3(g(rng), g(rng), g(rng)));
        }
        const MotionClip clip = root_trajectory_clip(roots, 30.0);
        Vec2 acc = Vec2::Zero();
        for (const Vec2& v : ground_truth_velocity(clip)) acc += v / 30.0;
        const Vec3 d = roots.back() - roots.front();
        CHECK((acc - Vec2(d.x(), d.z())).norm() < 1e-9);
    }
    SUBCASE("too short throws") {
        std::vector<Vec3> roots(1, Vec3::Zero());
        CHECK_THROWS_AS(ground_truth_velocity(root_trajectory_clip(roots, 30.0)), TooShort);
    }
}

TEST_CASE("dataset container round-trips bitwise") {
    const Skeleton skel = Skeleton::mean_shape();
    SynthOptions opt;
    opt.seed = 7;
    std::vector<SynthSequence> data;
    data.push_back(synthesize(make_leg_lift(skel, 2.0, 60.0, 1.2, 3.0), skel, opt, "lift"));
    data.push_back(synthesize(make_walk(skel, 2.0, 60.0, 1.0, 0.8, 0.4), skel, opt, "walk"));

    const std::string path = temp_path("bmc_test_dataset.bmds");
    write_dataset(data, path);
    const auto back = read_dataset(path);
    REQUIRE(back.size() == data.size());
    for (size_t s = 0; s < data.size(); ++s) {
        CHECK(back[s].name == data[s].name);
        CHECK(back[s].fps == data[s].fps);
        REQUIRE(back[s].frames.size() == data[s].frames.size());
        for (size_t i = 0; i < data[s].frames.size(); ++i) {
            const SynthFrame& a = data[s].frames[i];
            const SynthFrame& b = back[s].frames[i];
            CHECK(a.raw.h_lw == b.raw.h_lw);
            CHECK(a.raw.h_rp == b.raw.h_rp);
            CHECK((a.raw.a_lw - b.raw.a_lw).norm() == 0.0);
            CHECK((a.raw.r_rp.m - b.raw.r_rp.m).norm() == 0.0);
            CHECK((a.gt_root - b.gt_root).norm() == 0.0);
            CHECK((a.gt_v - b.gt_v).norm() == 0.0);
            for (int j = 0; j < kNumJoints; ++j) {
                CHECK((a.gt_pose[static_cast<size_t>(j)].m -
                       b.gt_pose[static_cast<size_t>(j)].m)
                          .norm() == 0.0);
            }
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("dataset container rejects damage") {
    const Skeleton skel = Skeleton::mean_shape();
    SynthOptions opt;
    std::vector<SynthSequence> data{
        synthesize(make_tpose_hold(skel, 1.0, 30.0), skel, opt, "hold")};
    const std::string path = temp_path("bmc_test_corrupt.bmds");
    write_dataset(data, path);

    SUBCASE("truncation") {
        const auto size = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, size / 2);
        CHECK_THROWS_AS(read_dataset(path), CorruptFile);
    }
    SUBCASE("bad magic") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
        f.close();
        CHECK_THROWS_AS(read_dataset(path), BadMagic);
    }
    SUBCASE("version mismatch") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const char bad[4] = {99, 0, 0, 0};
        f.write(bad, 4);
        f.close();
        CHECK_THROWS_AS(read_dataset(path), VersionMismatch);
    }
    std::remove(path.c_str());
}

TEST_CASE("hand-crafted header fixture parses") {
    const std::string path = temp_path("bmc_test_fixture.bmds");
    std::ofstream out(path, std::ios::binary);
    const unsigned char bytes[] = {'B', 'M', 'D', 'S', 1, 0, 0, 0, 0, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
    out.close();
    CHECK(read_dataset(path).empty());
    std::remove(path.c_str());
}

TEST_CASE("clip text format round-trips") {
    const Skeleton skel = Skeleton::mean_shape();
    const MotionClip clip = make_squat(skel, 1.5, 30.0, 0.2, 3.0);
    const std::string path = temp_path("bmc_test_clip.txt");
    write_clip(clip, path);
    const MotionClip back = load_clip(path);
    REQUIRE(back.frames.size() == clip.frames.size());
    CHECK(back.fps == clip.fps);
    for (size_t i = 0; i < clip.frames.size(); ++i) {
        CHECK((back.frames[i].root - clip.frames[i].root).norm() < 1e-12);
        for (int j = 0; j < kNumJoints; ++j) {
            CHECK((back.frames[i].pose[static_cast<size_t>(j)].m -
                   clip.frames[i].pose[static_cast<size_t>(j)].m)
                      .cwiseAbs()
                      .maxCoeff() < 1e-9);
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("smoothing switch changes the acceleration stream") {
    const Skeleton skel = Skeleton::mean_shape();
    const MotionClip clip = make_walk(skel, 3.0, 30.0, 1.2, 0.9, 0.0);
    const auto plain = synth_imu(clip, skel, false);
    const auto smooth = synth_imu(clip, skel, true);
    double diff = 0.0;
    for (size_t i = 0; i < plain.size(); ++i) {
        diff += (plain[i].a_lw - smooth[i].a_lw).norm();
        CHECK(smooth[i].a_lw.allFinite());
    }
    CHECK(diff > 0.0);
}

}  // TEST_SUITE
