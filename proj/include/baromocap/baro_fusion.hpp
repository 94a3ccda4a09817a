#pragma once

#include <vector>

#include <Eigen/Dense>

namespace baromocap {

/// Linear local pressure-to-height model: h = scale * (reference - p) + bias.
/// The linearization error over the few-meter range of human motion is far
/// below sensor noise; scale is calibrated per session anyway.
struct BaroModel {
    double scale_m_per_hpa = 8.43;  // sea-level default, validated in tests
    double bias_m = 0.0;
    double reference_hpa = 1013.25;
};

double pressure_to_height(double pressure_hpa, const BaroModel& model);
double height_to_pressure(double height_m, const BaroModel& model);

struct KalmanParams {
    double q_accel = 0.5;    // process noise spectral density, (m/s^2)^2
    double r_meas = 0.0025;  // measurement variance, m^2 (0.05 m std)
};

struct KfState {
    Eigen::Vector2d x = Eigen::Vector2d::Zero();  // height m, vertical velocity m/s
    Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
};

/// Constant-velocity model driven by vertical free acceleration as control
/// input. a_vertical is the world-frame vertical acceleration with gravity
/// already removed.
KfState kf_predict(const KfState& s, double a_vertical, double dt, const KalmanParams& p);

/// Measurement update with H = [1, 0] (Joseph-form covariance update).
/// Returns the posterior state and its height.
std::pair<KfState, double> kf_update(const KfState& s, double h_meas,
                                     const KalmanParams& p);

/// Streaming filter for one device. The first update initializes the state
/// from the measurement.
class HeightKalman {
public:
    explicit HeightKalman(KalmanParams params = {}) : params_(params) {}

    void predict(double a_vertical, double dt);
    double update(double h_meas);
    bool initialized() const { return initialized_; }
    const KfState& state() const { return state_; }
    void reset() { initialized_ = false; state_ = KfState{}; }

private:
    KalmanParams params_;
    KfState state_;
    bool initialized_ = false;
};

struct HeightSample {
    double pressure_hpa = 0.0;
    double a_vertical = 0.0;  // m/s^2, world frame, gravity-free
    double dt = 1.0 / 30.0;   // seconds since previous sample (ignored on the first)
};

struct FilteredHeight {
    double h = 0.0;  // meters relative to calibration ground
    double t = 0.0;  // seconds
};

/// Per-frame predict+update over a sample stream. A dt larger than the
/// nominal frame interval (dropped packets) is split into multiple predict
/// steps. Throws NonMonotonicTime when dt <= 0 after the first frame.
std::vector<FilteredHeight> fuse_stream(const std::vector<HeightSample>& frames,
                                        const BaroModel& model,
                                        const KalmanParams& params = {});

}  // namespace baromocap
