#include "baromocap/synth_data.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "baromocap/errors.hpp"
#include "baromocap/kinematics.hpp"

namespace baromocap {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

struct SitePositions {
    Vec3 wrist;
    Vec3 thigh;
    Vec3 left_foot;
    Vec3 right_foot;
};

SitePositions world_sites(const ClipFrame& f, const Skeleton& skel) {
    const FkResult r = fk(f.pose, skel);
    return {f.root + r.wrist_site, f.root + r.thigh_site, f.root + r.left_foot_site,
            f.root + r.right_foot_site};
}

std::vector<Vec3> moving_average5(const std::vector<Vec3>& p) {
    const int n = static_cast<int>(p.size());
    std::vector<Vec3> out(p.size());
    for (int i = 0; i < n; ++i) {
        Vec3 acc = Vec3::Zero();
        int count = 0;
        for (int k = i - 2; k <= i + 2; ++k) {
            if (k < 0 || k >= n) continue;
            acc += p[static_cast<size_t>(k)];
            ++count;
        }
        out[static_cast<size_t>(i)] = acc / count;
    }
    return out;
}

std::vector<Vec3> central_diff_accel(std::vector<Vec3> p, double dt, bool smooth) {
    if (smooth) p = moving_average5(p);
    const size_t n = p.size();
    std::vector<Vec3> a(n);
    const double inv_dt2 = 1.0 / (dt * dt);
    for (size_t i = 1; i + 1 < n; ++i) {
        a[i] = (p[i - 1] - 2.0 * p[i] + p[i + 1]) * inv_dt2;
    }
    a[0] = a[1];
    a[n - 1] = a[n - 2];
    return a;
}

}  // namespace

double standing_root_height(const Skeleton& skel) {
    JointRotations rest;
    const FkResult r = fk(rest, skel);
    return -std::min(r.left_foot_site.y(), r.right_foot_site.y());
}

MotionClip resample(const MotionClip& clip, double target_fps) {
    if (clip.fps <= 0.0 || target_fps <= 0.0) {
        throw DegenerateInput("resample: fps must be positive");
    }
    if (clip.frames.size() < 2 || clip.fps == target_fps) {
        MotionClip out = clip;
        out.fps = target_fps > 0 ? target_fps : clip.fps;
        return out;
    }
    const size_t n_in = clip.frames.size();
    const double duration = static_cast<double>(n_in - 1) / clip.fps;
    const auto n_out = static_cast<size_t>(std::floor(duration * target_fps + 1e-9)) + 1;

    MotionClip out;
    out.fps = target_fps;
    out.subject = clip.subject;
    out.frames.reserve(n_out);
    for (size_t j = 0; j < n_out; ++j) {
        const double t = static_cast<double>(j) / target_fps;
        double pos = t * clip.fps;
        auto i = static_cast<size_t>(pos);
        if (i >= n_in - 1) {
            i = n_in - 2;
            pos = static_cast<double>(n_in - 1);
        }
        const double u = pos - static_cast<double>(i);
        const ClipFrame& f0 = clip.frames[i];
        const ClipFrame& f1 = clip.frames[i + 1];
        ClipFrame f;
        f.root = (1.0 - u) * f0.root + u * f1.root;
        for (int jn = 0; jn < kNumJoints; ++jn) {
            const auto k = static_cast<size_t>(jn);
            f.pose[k] = (u == 0.0) ? f0.pose[k] : geodesic_interp(f0.pose[k], f1.pose[k], u);
        }
        out.frames.push_back(f);
    }
    return out;
}

std::vector<ImuSample> synth_imu(const MotionClip& clip, const Skeleton& skel,
                                 bool smooth_positions) {
    if (clip.frames.size() < 3) {
        throw TooShort("synth_imu needs at least 3 frames, got " +
                       std::to_string(clip.frames.size()));
    }
    const size_t n = clip.frames.size();
    const double dt = 1.0 / clip.fps;

    std::vector<Vec3> p_lw(n);
    std::vector<Vec3> p_rp(n);
    std::vector<ImuSample> out(n);
    for (size_t i = 0; i < n; ++i) {
        const FkResult r = fk(clip.frames[i].pose, skel);
        p_lw[i] = clip.frames[i].root + r.wrist_site;
        p_rp[i] = clip.frames[i].root + r.thigh_site;
        out[i].r_lw = r.orientations[static_cast<size_t>(skel.left_wrist())];
        out[i].r_rp = r.orientations[static_cast<size_t>(skel.right_hip())];
    }
    const std::vector<Vec3> a_lw = central_diff_accel(std::move(p_lw), dt, smooth_positions);
    const std::vector<Vec3> a_rp = central_diff_accel(std::move(p_rp), dt, smooth_positions);
    for (size_t i = 0; i < n; ++i) {
        out[i].a_lw = a_lw[i];
        out[i].a_rp = a_rp[i];
    }
    return out;
}

std::vector<HeightPair> synth_heights(const MotionClip& clip, const Skeleton& skel,
                                      double noise_std, std::uint64_t seed) {
    if (clip.frames.empty()) return {};
    const SitePositions first = world_sites(clip.frames.front(), skel);
    const double ground = std::min(first.left_foot.y(), first.right_foot.y());

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_std);
    std::vector<HeightPair> out;
    out.reserve(clip.frames.size());
    for (const ClipFrame& f : clip.frames) {
        const SitePositions s = world_sites(f, skel);
        HeightPair h;
        h.h_lw = s.wrist.y() - ground;
        h.h_rp = s.thigh.y() - ground;
        if (noise_std > 0.0) {
            h.h_lw += noise(rng);
            h.h_rp += noise(rng);
        }
        out.push_back(h);
    }
    return out;
}

std::vector<Vec2> ground_truth_velocity(const MotionClip& clip) {
    if (clip.frames.size() < 2) {
        throw TooShort("ground_truth_velocity needs at least 2 frames");
    }
    std::vector<Vec2> v;
    v.reserve(clip.frames.size() - 1);
    for (size_t i = 0; i + 1 < clip.frames.size(); ++i) {
        const Vec3 d = clip.frames[i + 1].root - clip.frames[i].root;
        v.emplace_back(d.x() * clip.fps, d.z() * clip.fps);
    }
    return v;
}

SynthSequence synthesize(const MotionClip& clip_in, const Skeleton& skel,
                         const SynthOptions& opt, const std::string& name) {
    const MotionClip clip = resample(clip_in, 30.0);
    const std::vector<ImuSample> imu = synth_imu(clip, skel, opt.smooth_positions);
    const std::vector<HeightPair> heights =
        synth_heights(clip, skel, opt.height_noise_std, opt.seed);
    const std::vector<Vec2> vel = ground_truth_velocity(clip);

    SynthSequence seq;
    seq.name = name;
    seq.fps = clip.fps;
    seq.frames.resize(clip.frames.size());
    for (size_t i = 0; i < clip.frames.size(); ++i) {
        SynthFrame& f = seq.frames[i];
        f.raw.a_lw = imu[i].a_lw;
        f.raw.a_rp = imu[i].a_rp;
        f.raw.r_lw = imu[i].r_lw;
        f.raw.r_rp = imu[i].r_rp;
        f.raw.h_lw = heights[i].h_lw;
        f.raw.h_rp = heights[i].h_rp;
        f.raw.t = static_cast<double>(i) / clip.fps;
        f.gt_pose = clip.frames[i].pose;
        f.gt_root = clip.frames[i].root;
        f.gt_v = (i == 0) ? Vec2::Zero() : vel[i - 1];
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Dataset container
// ---------------------------------------------------------------------------

namespace {

constexpr char kDatasetMagic[4] = {'B', 'M', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw CorruptFile("unexpected end of file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw CorruptFile("unexpected end of file");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void put_mat3(std::ostream& out, const Mat3& m) {
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) put_f64(out, m(r, c));
}

Mat3 get_mat3(std::istream& in) {
    Mat3 m;
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) m(r, c) = get_f64(in);
    return m;
}

void put_vec3(std::ostream& out, const Vec3& v) {
    put_f64(out, v.x());
    put_f64(out, v.y());
    put_f64(out, v.z());
}

Vec3 get_vec3(std::istream& in) {
    Vec3 v;
    v.x() = get_f64(in);
    v.y() = get_f64(in);
    v.z() = get_f64(in);
    return v;
}

}  // namespace

void write_dataset(const std::vector<SynthSequence>& sequences, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset file " + path);
    out.write(kDatasetMagic, 4);
    put_u32(out, kDatasetVersion);
    put_u32(out, static_cast<std::uint32_t>(sequences.size()));
    for (const SynthSequence& seq : sequences) {
        put_u32(out, static_cast<std::uint32_t>(seq.name.size()));
        out.write(seq.name.data(), static_cast<std::streamsize>(seq.name.size()));
        put_f64(out, seq.fps);
        put_u32(out, static_cast<std::uint32_t>(seq.frames.size()));
        for (const SynthFrame& f : seq.frames) {
            put_vec3(out, f.raw.a_lw);
            put_vec3(out, f.raw.a_rp);
            put_mat3(out, f.raw.r_lw.m);
            put_mat3(out, f.raw.r_rp.m);
            put_f64(out, f.raw.h_lw);
            put_f64(out, f.raw.h_rp);
            put_f64(out, f.raw.t);
            for (const Rot3& r : f.gt_pose) put_mat3(out, r.m);
            put_vec3(out, f.gt_root);
            put_f64(out, f.gt_v.x());
            put_f64(out, f.gt_v.y());
        }
    }
    if (!out) throw IoError("write failed for dataset file " + path);
}

std::vector<SynthSequence> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kDatasetMagic, 4) != 0) {
        throw BadMagic("not a dataset file: " + path);
    }
    const std::uint32_t version = get_u32(in);
    if (version != kDatasetVersion) {
        throw VersionMismatch("dataset version " + std::to_string(version) +
                              ", expected " + std::to_string(kDatasetVersion));
    }
    const std::uint32_t n_seq = get_u32(in);
    std::vector<SynthSequence> sequences;
    sequences.reserve(n_seq);
    for (std::uint32_t s = 0; s < n_seq; ++s) {
        SynthSequence seq;
        const std::uint32_t name_len = get_u32(in);
        seq.name.resize(name_len);
        if (name_len > 0 && !in.read(seq.name.data(), name_len)) {
            throw CorruptFile("unexpected end of file in sequence name");
        }
        seq.fps = get_f64(in);
        const std::uint32_t n_frames = get_u32(in);
        seq.frames.resize(n_frames);
        for (std::uint32_t i = 0; i < n_frames; ++i) {
            SynthFrame& f = seq.frames[i];
            f.raw.a_lw = get_vec3(in);
            f.raw.a_rp = get_vec3(in);
            f.raw.r_lw = Rot3{get_mat3(in)};
            f.raw.r_rp = Rot3{get_mat3(in)};
            f.raw.h_lw = get_f64(in);
            f.raw.h_rp = get_f64(in);
            f.raw.t = get_f64(in);
            for (Rot3& r : f.gt_pose) r = Rot3{get_mat3(in)};
            f.gt_root = get_vec3(in);
            f.gt_v.x() = get_f64(in);
            f.gt_v.y() = get_f64(in);
        }
        sequences.push_back(std::move(seq));
    }
    return sequences;
}

// ---------------------------------------------------------------------------
// Clip text format
// ---------------------------------------------------------------------------

void write_clip(const MotionClip& clip, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write clip file " + path);
    out.precision(17);
    out << "fps " << clip.fps << "\n";
    out << "joints " << kNumJoints << "\n";
    out << "frames " << clip.frames.size() << "\n";
    if (!clip.subject.empty()) out << "subject " << clip.subject << "\n";
    for (const ClipFrame& f : clip.frames) {
        for (const Rot3& r : f.pose) {
            const Vec3 aa = log_so3(r);
            out << aa.x() << " " << aa.y() << " " << aa.z() << " ";
        }
        out << f.root.x() << " " << f.root.y() << " " << f.root.z() << "\n";
    }
}

MotionClip load_clip(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open clip file " + path);
    MotionClip clip;
    size_t n_frames = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string head;
        ss >> head;
        if (head == "fps") {
            ss >> clip.fps;
        } else if (head == "joints") {
            int joints = 0;
            ss >> joints;
            if (joints != kNumJoints) {
                throw CorruptFile("clip joint count must be 24, got " +
                                  std::to_string(joints));
            }
        } else if (head == "frames") {
            ss >> n_frames;
        } else if (head == "subject") {
            ss >> clip.subject;
        } else {
            std::istringstream fs(line);
            ClipFrame f;
            for (int j = 0; j < kNumJoints; ++j) {
                Vec3 aa;
                fs >> aa.x() >> aa.y() >> aa.z();
                f.pose[static_cast<size_t>(j)] = exp_so3(aa);
            }
            fs >> f.root.x() >> f.root.y() >> f.root.z();
            if (!fs) throw CorruptFile("malformed clip frame line");
            clip.frames.push_back(f);
        }
    }
    if (n_frames != 0 && n_frames != clip.frames.size()) {
        throw CorruptFile("clip frame count does not match header");
    }
    return clip;
}

// ---------------------------------------------------------------------------
// Procedural clips
// ---------------------------------------------------------------------------

namespace {

MotionClip blank_clip(const Skeleton& skel, double seconds, double fps,
                      const std::string& subject) {
    MotionClip clip;
    clip.fps = fps;
    clip.subject = subject;
    const auto n = static_cast<size_t>(std::lround(seconds * fps)) + 1;
    clip.frames.resize(n);
    const double stand = standing_root_height(skel);
    for (ClipFrame& f : clip.frames) f.root = Vec3(0.0, stand, 0.0);
    return clip;
}

// Smooth on/off envelope so clips start and end at rest (keeps the central
// differences clean at the clip edges).
double envelope(double t, double total) {
    const double ramp = std::min(1.0, total / 6.0);
    if (t < ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * t / ramp);
    if (t > total - ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * (total - t) / ramp);
    return 1.0;
}

}  // namespace

MotionClip make_tpose_hold(const Skeleton& skel, double seconds, double fps) {
    return blank_clip(skel, seconds, fps, "tpose_hold");
}

MotionClip make_leg_lift(const Skeleton& skel, double seconds, double fps,
                         double max_angle_rad, double period_s) {
    MotionClip clip = blank_clip(skel, seconds, fps, "leg_lift");
    const auto right_hip = static_cast<size_t>(skel.right_hip());
    for (size_t i = 0; i < clip.frames.size(); ++i) {
        const double t = static_cast<double>(i) / fps;
        const double lift = 0.5 * (1.0 - std::cos(kTau * t / period_s));
        const double angle = max_angle_rad * lift * envelope(t, seconds);
        clip.frames[i].pose[right_hip] = Rot3::about_x(angle);
    }
    return clip;
}

MotionClip make_squat(const Skeleton& skel, double seconds, double fps, double depth_m,
                      double period_s) {
    MotionClip clip = blank_clip(skel, seconds, fps, "squat");
    const double stand = standing_root_height(skel);
    const double upper = skel.joint(skel.right_knee()).offset.norm();
    for (size_t i = 0; i < clip.frames.size(); ++i) {
        const double t = static_cast<double>(i) / fps;
        const double drop =
            depth_m * 0.5 * (1.0 - std::cos(kTau * t / period_s)) * envelope(t, seconds);
        // Hip and knee flexion consistent with the root drop on a two-bone leg.
        const double hip_angle = std::acos(std::clamp(1.0 - drop / (2.0 * upper), -1.0, 1.0));
        ClipFrame& f = clip.frames[i];
        f.root = Vec3(0.0, stand - drop, 0.0);
        f.pose[static_cast<size_t>(skel.index_of("left_hip"))] = Rot3::about_x(hip_angle);
        f.pose[static_cast<size_t>(skel.index_of("right_hip"))] = Rot3::about_x(hip_angle);
        f.pose[static_cast<size_t>(skel.index_of("left_knee"))] = Rot3::about_x(-2.0 * hip_angle);
        f.pose[static_cast<size_t>(skel.index_of("right_knee"))] = Rot3::about_x(-2.0 * hip_angle);
        f.pose[static_cast<size_t>(skel.index_of("left_ankle"))] = Rot3::about_x(hip_angle);
        f.pose[static_cast<size_t>(skel.index_of("right_ankle"))] = Rot3::about_x(hip_angle);
    }
    return clip;
}

MotionClip make_walk(const Skeleton& skel, double seconds, double fps, double speed_mps,
                     double stride_hz, double heading_rad) {
    MotionClip clip = blank_clip(skel, seconds, fps, "walk");
    const double stand = standing_root_height(skel);
    const Rot3 heading = Rot3::about_y(heading_rad);
    const Vec3 forward = heading.m * Vec3(0.0, 0.0, -1.0);
    double distance = 0.0;
    for (size_t i = 0; i < clip.frames.size(); ++i) {
        const double t = static_cast<double>(i) / fps;
        const double env = envelope(t, seconds);
        const double phase = kTau * stride_hz * t;
        const double swing = 0.5 * env * std::sin(phase);

        ClipFrame& f = clip.frames[i];
        if (i > 0) distance += env * speed_mps / fps;
        f.root = forward * distance + Vec3(0.0, stand + 0.02 * env * std::sin(2.0 * phase), 0.0);
        f.pose[0] = heading;
        f.pose[static_cast<size_t>(skel.index_of("left_hip"))] = Rot3::about_x(swing);
        f.pose[static_cast<size_t>(skel.index_of("right_hip"))] = Rot3::about_x(-swing);
        const double knee = 0.35 * env * (1.0 - std::cos(phase));
        f.pose[static_cast<size_t>(skel.index_of("left_knee"))] = Rot3::about_x(-knee * 0.5);
        f.pose[static_cast<size_t>(skel.index_of("right_knee"))] =
            Rot3::about_x(-0.35 * env * (1.0 + std::cos(phase)) * 0.5);
        // Arms swing opposite the legs about the shoulder.
        f.pose[static_cast<size_t>(skel.index_of("left_shoulder"))] = Rot3::about_z(-swing);
        f.pose[static_cast<size_t>(skel.index_of("right_shoulder"))] = Rot3::about_z(-swing);
    }
    return clip;
}

MotionClip make_stair_climb(const Skeleton& skel, double seconds, double fps,
                            double ascent_mps, double advance_mps, double step_hz) {
    MotionClip clip = blank_clip(skel, seconds, fps, "stair_climb");
    const double stand = standing_root_height(skel);
    double ascent = 0.0;
    double advance = 0.0;
    for (size_t i = 0; i < clip.frames.size(); ++i) {
        const double t = static_cast<double>(i) / fps;
        const double env = envelope(t, seconds);
        const double phase = kTau * step_hz * t;
        if (i > 0) {
            ascent += env * ascent_mps / fps;
            advance += env * advance_mps / fps;
        }
        ClipFrame& f = clip.frames[i];
        f.root = Vec3(0.0, stand + ascent, -advance);
        const double step = 0.6 * env;
        f.pose[static_cast<size_t>(skel.index_of("left_hip"))] =
            Rot3::about_x(step * 0.5 * (1.0 + std::sin(phase)));
        f.pose[static_cast<size_t>(skel.index_of("right_hip"))] =
            Rot3::about_x(step * 0.5 * (1.0 - std::sin(phase)));
        f.pose[static_cast<size_t>(skel.index_of("left_knee"))] =
            Rot3::about_x(-step * 0.6 * (1.0 + std::sin(phase)));
        f.pose[static_cast<size_t>(skel.index_of("right_knee"))] =
            Rot3::about_x(-step * 0.6 * (1.0 - std::sin(phase)));
    }
    return clip;
}

std::vector<MotionClip> make_clip_suite(const Skeleton& skel, std::uint64_t seed,
                                        int variants_per_kind, double seconds) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<MotionClip> clips;
    const double fps = 60.0;  // native rate; consumers resample to 30
    for (int v = 0; v < variants_per_kind; ++v) {
        clips.push_back(make_tpose_hold(skel, seconds, fps));
        clips.push_back(make_leg_lift(skel, seconds, fps, (0.6 + 0.9 * u(rng)),
                                      2.0 + 2.5 * u(rng)));
        clips.push_back(make_squat(skel, seconds, fps, 0.15 + 0.2 * u(rng),
                                   3.0 + 2.0 * u(rng)));
        clips.push_back(make_walk(skel, seconds, fps, 0.8 + 0.8 * u(rng),
                                  0.7 + 0.5 * u(rng), kTau * u(rng)));
        clips.push_back(make_stair_climb(skel, seconds, fps, 0.10 + 0.10 * u(rng),
                                         0.2 + 0.2 * u(rng), 0.6 + 0.4 * u(rng)));
    }
    for (size_t i = 0; i < clips.size(); ++i) {
        clips[i].subject += "_" + std::to_string(i);
    }
    return clips;
}

}  // namespace baromocap
