#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "baromocap/baro_fusion.hpp"
#include "baromocap/errors.hpp"

using namespace baromocap;

namespace {

// International barometric formula for the standard atmosphere; the linear
// model is checked against this independent route.
double barometric_height(double p_hpa, double p0_hpa) {
    return 44330.0 * (1.0 - std::pow(p_hpa / p0_hpa, 1.0 / 5.255));
}

std::vector<double> eigenvalues2(const Eigen::Matrix2d& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m);
    return {solver.eigenvalues()[0], solver.eigenvalues()[1]};
}

double variance(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / static_cast<double>(xs.size());
}

}  // namespace

TEST_SUITE("baro_fusion") {

TEST_CASE("pressure_to_height basics") {
    BaroModel m{8.43, 0.0, 1013.25};
    CHECK(pressure_to_height(1013.25, m) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pressure_to_height(1013.13, m) == doctest::Approx(8.43 * 0.12).epsilon(1e-9));
    CHECK(pressure_to_height(1013.13, m) == doctest::Approx(1.01).epsilon(0.01));

    m.bias_m = 0.37;
    CHECK(pressure_to_height(1013.25, m) == doctest::Approx(0.37).epsilon(1e-12));

    CHECK(height_to_pressure(pressure_to_height(1009.0, m), m) ==
          doctest::Approx(1009.0).epsilon(1e-12));
}

TEST_CASE("default scale agrees with the barometric formula at desk scale") {
    const double p0 = 1013.25;
    // Sea-level slope of the standard-atmosphere formula.
    const double slope = (barometric_height(p0 - 0.5, p0) - barometric_height(p0 + 0.5, p0));
    CHECK(std::abs(8.43 - slope) / slope < 0.02);

    // Linear model vs. the formula over the +-3 m range of human motion.
    BaroModel m{8.43, 0.0, p0};
    for (double h = -3.0; h <= 3.0; h += 0.25) {
        const double p = height_to_pressure(h, m);
        CHECK(std::abs(barometric_height(p, p0) - h) < 0.05);
    }
}

TEST_CASE("kf_predict closed-form kinematics") {
    KalmanParams params;
    KfState s;
    s.x << 1.0, 0.0;
    s.P.setIdentity();
    KfState out = kf_predict(s, 0.0, 1.0 / 30.0, params);
    CHECK(out.x[0] == doctest::Approx(1.0).epsilon(1e-15));

    s.x << 0.0, 1.0;
    out = kf_predict(s, 0.0, 1.0 / 30.0, params);
    CHECK(out.x[0] == doctest::Approx(1.0 / 30.0).epsilon(1e-15));

    s.x << 0.0, 0.0;
    out = kf_predict(s, 9.0, 0.1, params);
    CHECK(out.x[0] == doctest::Approx(0.045).epsilon(1e-12));
    CHECK(out.x[1] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("kf_update gain limits") {
    KalmanParams params;
    KfState s;
    s.x << 2.0, 0.3;

    // Perfect prior: zero gain regardless of the measurement.
    s.P.setZero();
    auto [post_zero, h_zero] = kf_update(s, 99.0, params);
    CHECK(h_zero == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(post_zero.x[1] == doctest::Approx(0.3).epsilon(1e-12));

    // Vanishing measurement noise: posterior snaps to the measurement.
    s.P.setIdentity();
    KalmanParams trusting;
    trusting.r_meas = 1e-15;
    auto [post_meas, h_meas] = kf_update(s, 99.0, trusting);
    CHECK(h_meas == doctest::Approx(99.0).epsilon(1e-9));
    (void)post_meas;
}

TEST_CASE("filter converges to a constant measurement in 300 steps") {
    KalmanParams params;
    KfState s;
    s.x << 0.0, 0.0;
    s.P.setIdentity();
    double h = 0.0;
    for (int i = 0; i < 300; ++i) {
        s = kf_predict(s, 0.0, 1.0 / 30.0, params);
        std::tie(s, h) = kf_update(s, 1.0, params);
    }
    CHECK(std::abs(h - 1.0) < 0.01);
}

TEST_CASE("covariance stays symmetric PSD through random predict/update") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.0, 1.0);
    KalmanParams params;
    KfState s;
    s.P.setIdentity();
    for (int i = 0; i < 2000; ++i) {
        if (i % 3 != 2) {
            s = kf_predict(s, 3.0 * g(rng), 1.0 / 30.0, params);
        } else {
            std::tie(s, std::ignore) = kf_update(s, g(rng), params);
        }
        CHECK(std::abs(s.P(0, 1) - s.P(1, 0)) < 1e-12);
        for (double ev : eigenvalues2(s.P)) CHECK(ev >= -1e-9);
    }
}

TEST_CASE("fuse_stream tracks a noiseless sinusoid") {
    const double amp = 0.5;
    const double omega = 2.0 * std::numbers::pi * 0.5;
    const double dt = 1.0 / 30.0;
    BaroModel model{8.43, 0.0, 1013.25};
    std::vector<HeightSample> frames;
    std::vector<double> truth;
    for (int i = 0; i < 600; ++i) {
        const double t = i * dt;
        const double h = 1.0 + amp * std::sin(omega * t);
        truth.push_back(h);
        frames.push_back({height_to_pressure(h, model),
                          -amp * omega * omega * std::sin(omega * t), dt});
    }
    const auto filtered = fuse_stream(frames, model);
    REQUIRE(filtered.size() == truth.size());
    double sq = 0.0;
    for (size_t i = 0; i < truth.size(); ++i) {
        sq += (filtered[i].h - truth[i]) * (filtered[i].h - truth[i]);
    }
    CHECK(std::sqrt(sq / truth.size()) < 0.02);
}

TEST_CASE("fuse_stream holds a constant input constant") {
    BaroModel model;
    std::vector<HeightSample> frames(200, HeightSample{1000.0, 0.0, 1.0 / 30.0});
    const auto filtered = fuse_stream(frames, model);
    for (const FilteredHeight& f : filtered) {
        CHECK(f.h == filtered.front().h);
    }
}

TEST_CASE("fuse_stream reduces noise variance by at least 30 percent") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> noise(0.0, 0.05);
    BaroModel model{8.43, 0.0, 1013.25};
    const double dt = 1.0 / 30.0;
    std::vector<HeightSample> frames;
    std::vector<double> raw;
    for (int i = 0; i < 600; ++i) {  // 20 s constant truth at 1 m
        const double h = 1.0 + noise(rng);
        raw.push_back(h);
        frames.push_back({height_to_pressure(h, model), 0.0, dt});
    }
    const auto filtered = fuse_stream(frames, model);
    // Score a 10 s window after the transient.
    std::vector<double> raw_win;
    std::vector<double> filt_win;
    for (size_t i = 300; i < 600; ++i) {
        raw_win.push_back(raw[i]);
        filt_win.push_back(filtered[i].h);
    }
    const double raw_var = variance(raw_win);
    const double filt_var = variance(filt_win);
    CHECK(filt_var < raw_var);
    CHECK(filt_var <= 0.7 * raw_var);

    double raw_mse = 0.0;
    double filt_mse = 0.0;
    for (size_t i = 300; i < 600; ++i) {
        raw_mse += (raw[i] - 1.0) * (raw[i] - 1.0);
        filt_mse += (filtered[i].h - 1.0) * (filtered[i].h - 1.0);
    }
    CHECK(filt_mse < raw_mse);
}

TEST_CASE("fuse_stream is deterministic on replay") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> noise(0.0, 0.05);
    BaroModel model;
    std::vector<HeightSample> frames;
    for (int i = 0; i < 100; ++i) {
        frames.push_back({1000.0 + noise(rng), noise(rng), 1.0 / 30.0});
    }
    const auto a = fuse_stream(frames, model);
    const auto b = fuse_stream(frames, model);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].h == b[i].h);  // bit-stable
    }
}

TEST_CASE("fuse_stream rejects non-monotone time") {
    BaroModel model;
    std::vector<HeightSample> frames = {{1000.0, 0.0, 1.0 / 30.0},
                                        {1000.0, 0.0, -1.0 / 30.0}};
    CHECK_THROWS_AS(fuse_stream(frames, model), NonMonotonicTime);
}

TEST_CASE("a dropped-packet gap grows uncertainty more than one step") {
    KalmanParams params;
    BaroModel model;
    std::vector<HeightSample> single = {{1013.25, 0.0, 1.0 / 30.0},
                                        {1013.25, 0.0, 1.0 / 30.0}};
    std::vector<HeightSample> gap = {{1013.25, 0.0, 1.0 / 30.0},
                                     {1013.25, 0.0, 6.0 / 30.0}};
    // Run manually to inspect covariance right before the update.
    HeightKalman a(params);
    a.update(pressure_to_height(single[0].pressure_hpa, model));
    a.predict(0.0, single[1].dt);
    HeightKalman b(params);
    b.update(pressure_to_height(gap[0].pressure_hpa, model));
    for (int i = 0; i < 6; ++i) b.predict(0.0, 1.0 / 30.0);
    CHECK(b.state().P(0, 0) > a.state().P(0, 0));
}

}  // TEST_SUITE
