#include "baromocap/calibration.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "baromocap/errors.hpp"
#include "baromocap/kinematics.hpp"

namespace baromocap {

namespace {

constexpr double kMaxAccelStd = 0.3;          // m/s^2
constexpr double kMaxOrientationSpread = 5.0 * std::numbers::pi / 180.0;
constexpr double kMinPressureSpan = 0.005;    // hPa
constexpr size_t kMinFramePairs = 60;
constexpr double kMaxPairSkew = 0.05;         // seconds

void validate_set(const CalibSampleSet& set, CalibLabel expected, const char* op) {
    if (set.label != expected) {
        throw BadSampleSet(std::string(op) + ": wrong window label");
    }
    if (set.frames.size() < kMinFramePairs) {
        throw BadSampleSet(std::string(op) + ": need at least 60 frame pairs, got " +
                           std::to_string(set.frames.size()));
    }
    for (const CalibFramePair& p : set.frames) {
        if (std::abs(p.wrist.t - p.pocket.t) > kMaxPairSkew) {
            throw BadSampleSet(std::string(op) + ": device timestamps paired worse than 50 ms");
        }
    }
}

double accel_std(const CalibSampleSet& set, bool wrist) {
    Vec3 mean = Vec3::Zero();
    for (const CalibFramePair& p : set.frames) mean += wrist ? p.wrist.accel : p.pocket.accel;
    mean /= static_cast<double>(set.frames.size());
    double var = 0.0;
    for (const CalibFramePair& p : set.frames) {
        var += ((wrist ? p.wrist.accel : p.pocket.accel) - mean).squaredNorm();
    }
    return std::sqrt(var / static_cast<double>(set.frames.size()));
}

void require_stationary(const CalibSampleSet& set, const char* op) {
    for (bool wrist : {true, false}) {
        const double sd = accel_std(set, wrist);
        if (sd >= kMaxAccelStd) {
            throw NotStationary(std::string(op) + ": acceleration std " +
                                std::to_string(sd) + " m/s^2 exceeds 0.3");
        }
    }
}

std::vector<Rot3> device_orientations(const CalibSampleSet& set, bool wrist) {
    std::vector<Rot3> rs;
    rs.reserve(set.frames.size());
    for (const CalibFramePair& p : set.frames) rs.push_back(wrist ? p.wrist.orient : p.pocket.orient);
    return rs;
}

}  // namespace

std::pair<double, double> estimate_bias(const CalibSampleSet& same_height,
                                        const BaroModel& wrist_model,
                                        const BaroModel& pocket_model) {
    validate_set(same_height, CalibLabel::same_height, "estimate_bias");
    require_stationary(same_height, "estimate_bias");

    BaroModel wrist_raw = wrist_model;
    BaroModel pocket_raw = pocket_model;
    wrist_raw.bias_m = 0.0;
    pocket_raw.bias_m = 0.0;

    double acc = 0.0;
    for (const CalibFramePair& p : same_height.frames) {
        acc += pressure_to_height(p.pocket.pressure_hpa, pocket_raw) -
               pressure_to_height(p.wrist.pressure_hpa, wrist_raw);
    }
    return {acc / static_cast<double>(same_height.frames.size()), 0.0};
}

double estimate_scale(const CalibSampleSet& t_pose, const BaroModel& wrist_with_bias,
                      const BaroModel& pocket, double known_dh) {
    validate_set(t_pose, CalibLabel::t_pose, "estimate_scale");
    require_stationary(t_pose, "estimate_scale");
    if (std::abs(known_dh) < 1e-9) {
        throw DegenerateSpan("estimate_scale: known height offset is zero");
    }

    // Bias-adjusted pressure span attributable to the height difference.
    double span_hpa = 0.0;
    for (const CalibFramePair& p : t_pose.frames) {
        span_hpa += p.pocket.pressure_hpa - p.wrist.pressure_hpa;
    }
    span_hpa /= static_cast<double>(t_pose.frames.size());
    span_hpa += wrist_with_bias.bias_m / wrist_with_bias.scale_m_per_hpa;
    span_hpa -= pocket.bias_m / pocket.scale_m_per_hpa;

    if (std::abs(span_hpa) < kMinPressureSpan) {
        throw DegenerateSpan("estimate_scale: pressure span " + std::to_string(span_hpa) +
                             " hPa is too small to divide by");
    }
    return known_dh / span_hpa;
}

FrameAlignment align_frames(const CalibSampleSet& t_pose) {
    validate_set(t_pose, CalibLabel::t_pose, "align_frames");

    FrameAlignment out;
    for (bool wrist : {true, false}) {
        const std::vector<Rot3> rs = device_orientations(t_pose, wrist);
        const Rot3 mean = mean_rotation(rs);
        for (const Rot3& r : rs) {
            if (geodesic_angle(mean, r) > kMaxOrientationSpread) {
                throw ExcessiveMotion("align_frames: orientation varies more than 5 deg");
            }
        }
        // Canonical T-pose bone orientation is the identity, so the offset is
        // just the inverse of the measured mean.
        (wrist ? out.wrist_offset : out.pocket_offset) = mean.transpose();
    }
    out.world_yaw = Rot3::identity();
    return out;
}

double set_ground(const JointRotations& first_frame_pose, const Skeleton& skel,
                  double h_pocket_absolute) {
    const FkResult r = fk(first_frame_pose, skel);
    const double feet = std::min(r.left_foot_site.y(), r.right_foot_site.y());
    const double thigh_above_feet = r.thigh_site.y() - feet;
    return h_pocket_absolute - thigh_above_feet;
}

CalibProfile calibrate(const CalibSampleSet& same_height, const CalibSampleSet& t_pose,
                       const Skeleton& skel, double known_dh, double reference_hpa,
                       double initial_scale_m_per_hpa) {
    CalibProfile profile;
    profile.wrist = BaroModel{initial_scale_m_per_hpa, 0.0, reference_hpa};
    profile.pocket = BaroModel{initial_scale_m_per_hpa, 0.0, reference_hpa};

    auto [wrist_bias, pocket_bias] = estimate_bias(same_height, profile.wrist, profile.pocket);
    profile.wrist.bias_m = wrist_bias;
    profile.pocket.bias_m = pocket_bias;

    const double scale = estimate_scale(t_pose, profile.wrist, profile.pocket, known_dh);
    // Biases were measured in meters at the old scale; keep the underlying
    // pressure offset fixed while the scale changes.
    profile.wrist.bias_m *= scale / profile.wrist.scale_m_per_hpa;
    profile.pocket.bias_m *= scale / profile.pocket.scale_m_per_hpa;
    profile.wrist.scale_m_per_hpa = scale;
    profile.pocket.scale_m_per_hpa = scale;

    const FrameAlignment align = align_frames(t_pose);
    profile.wrist_offset = align.wrist_offset;
    profile.pocket_offset = align.pocket_offset;
    profile.world_yaw = align.world_yaw;

    double pocket_abs = 0.0;
    for (const CalibFramePair& p : t_pose.frames) {
        pocket_abs += pressure_to_height(p.pocket.pressure_hpa, profile.pocket);
    }
    pocket_abs /= static_cast<double>(t_pose.frames.size());
    profile.ground_height = set_ground(JointRotations{}, skel, pocket_abs);
    return profile;
}

// ---------------------------------------------------------------------------
// Profile file (key-value text, matrices row-major)
// ---------------------------------------------------------------------------

namespace {

void put_rot(std::ostream& out, const char* key, const Rot3& r) {
    out << key;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) out << " " << r.m(row, col);
    out << "\n";
}

Rot3 parse_rot(std::istringstream& ss, const std::string& key) {
    Mat3 m;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) ss >> m(row, col);
    if (!ss) throw CorruptFile("calibration profile: bad matrix for " + key);
    return Rot3{m};
}

}  // namespace

std::string CalibProfile::to_text() const {
    std::ostringstream out;
    out.precision(17);
    out << "baromocap_calib 1\n";
    out << "wrist.scale " << wrist.scale_m_per_hpa << "\n";
    out << "wrist.bias " << wrist.bias_m << "\n";
    out << "wrist.reference " << wrist.reference_hpa << "\n";
    out << "pocket.scale " << pocket.scale_m_per_hpa << "\n";
    out << "pocket.bias " << pocket.bias_m << "\n";
    out << "pocket.reference " << pocket.reference_hpa << "\n";
    put_rot(out, "wrist.r_offset", wrist_offset);
    put_rot(out, "pocket.r_offset", pocket_offset);
    put_rot(out, "world_yaw", world_yaw);
    out << "ground_height " << ground_height << "\n";
    return out.str();
}

void CalibProfile::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write calibration profile " + path);
    out << to_text();
}

CalibProfile CalibProfile::from_text(const std::string& text) {
    std::istringstream in(text);
    CalibProfile p;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "baromocap_calib") {
            int version = 0;
            ss >> version;
            if (version != 1) throw VersionMismatch("calibration profile version " +
                                                    std::to_string(version));
            header_seen = true;
        } else if (key == "wrist.scale") ss >> p.wrist.scale_m_per_hpa;
        else if (key == "wrist.bias") ss >> p.wrist.bias_m;
        else if (key == "wrist.reference") ss >> p.wrist.reference_hpa;
        else if (key == "pocket.scale") ss >> p.pocket.scale_m_per_hpa;
        else if (key == "pocket.bias") ss >> p.pocket.bias_m;
        else if (key == "pocket.reference") ss >> p.pocket.reference_hpa;
        else if (key == "wrist.r_offset") p.wrist_offset = parse_rot(ss, key);
        else if (key == "pocket.r_offset") p.pocket_offset = parse_rot(ss, key);
        else if (key == "world_yaw") p.world_yaw = parse_rot(ss, key);
        else if (key == "ground_height") ss >> p.ground_height;
        else throw CorruptFile("calibration profile: unknown key " + key);
        if (!ss) throw CorruptFile("calibration profile: bad value for " + key);
    }
    if (!header_seen) throw BadMagic("text is not a calibration profile");
    return p;
}

CalibProfile CalibProfile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open calibration profile " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

}  // namespace baromocap
