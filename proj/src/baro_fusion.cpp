#include "baromocap/baro_fusion.hpp"

#include <cmath>

#include "baromocap/errors.hpp"

namespace baromocap {

namespace {
constexpr double kNominalDt = 1.0 / 30.0;
}

double pressure_to_height(double pressure_hpa, const BaroModel& model) {
    return model.scale_m_per_hpa * (model.reference_hpa - pressure_hpa) + model.bias_m;
}

double height_to_pressure(double height_m, const BaroModel& model) {
    return model.reference_hpa - (height_m - model.bias_m) / model.scale_m_per_hpa;
}

KfState kf_predict(const KfState& s, double a_vertical, double dt, const KalmanParams& p) {
    Eigen::Matrix2d f;
    f << 1.0, dt,
        0.0, 1.0;
    Eigen::Vector2d b(0.5 * dt * dt, dt);

    KfState out;
    out.x = f * s.x + b * a_vertical;

    const double dt2 = dt * dt;
    Eigen::Matrix2d q;
    q << dt2 * dt2 / 4.0, dt2 * dt / 2.0,
        dt2 * dt / 2.0, dt2;
    q *= p.q_accel;

    out.P = f * s.P * f.transpose() + q;
    out.P = 0.5 * (out.P + out.P.transpose().eval());  // keep symmetric
    return out;
}

std::pair<KfState, double> kf_update(const KfState& s, double h_meas,
                                     const KalmanParams& p) {
    const Eigen::RowVector2d h(1.0, 0.0);
    const double innov_var = s.P(0, 0) + p.r_meas;
    const Eigen::Vector2d gain = s.P.col(0) / innov_var;

    KfState out;
    out.x = s.x + gain * (h_meas - s.x[0]);
    const Eigen::Matrix2d ikh = Eigen::Matrix2d::Identity() - gain * h;
    out.P = ikh * s.P * ikh.transpose() + gain * p.r_meas * gain.transpose();
    out.P = 0.5 * (out.P + out.P.transpose().eval());
    return {out, out.x[0]};
}

void HeightKalman::predict(double a_vertical, double dt) {
    if (!initialized_) return;  // nothing to propagate before the first fix
    state_ = kf_predict(state_, a_vertical, dt, params_);
}

double HeightKalman::update(double h_meas) {
    if (!initialized_) {
        state_.x = Eigen::Vector2d(h_meas, 0.0);
        state_.P << params_.r_meas, 0.0,
            0.0, 1.0;
        initialized_ = true;
        return h_meas;
    }
    auto [next, h] = kf_update(state_, h_meas, params_);
    state_ = next;
    return h;
}

std::vector<FilteredHeight> fuse_stream(const std::vector<HeightSample>& frames,
                                        const BaroModel& model,
                                        const KalmanParams& params) {
    std::vector<FilteredHeight> out;
    out.reserve(frames.size());
    HeightKalman kf(params);
    double t = 0.0;
    bool first = true;
    for (const HeightSample& frame : frames) {
        if (first) {
            first = false;
        } else {
            if (!(frame.dt > 0.0)) {
                throw NonMonotonicTime("fuse_stream: dt must be positive, got " +
                                       std::to_string(frame.dt));
            }
            t += frame.dt;
            // A gap covers several missed frames: propagate in nominal-size
            // steps so process noise accumulates per step, not per gap.
            double remaining = frame.dt;
            while (remaining > 1.5 * kNominalDt) {
                kf.predict(frame.a_vertical, kNominalDt);
                remaining -= kNominalDt;
            }
            kf.predict(frame.a_vertical, remaining);
        }
        const double h = kf.update(pressure_to_height(frame.pressure_hpa, model));
        out.push_back(FilteredHeight{h, t});
    }
    return out;
}

}  // namespace baromocap
