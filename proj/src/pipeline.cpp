#include "baromocap/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>
#include <thread>

#include "baromocap/errors.hpp"
#include "baromocap/feature_builder.hpp"

namespace baromocap {

namespace {
constexpr double kGravityMps2 = 9.80665;
constexpr size_t kLatencyLogCap = 16384;
}

Engine::Engine(CalibProfile profile, Skeleton skel, PoseNet pose_net,
               VelocityNet velocity_net, EngineParams params)
    : profile_(std::move(profile)),
      skel_(std::move(skel)),
      pose_net_(std::move(pose_net)),
      velocity_net_(std::move(velocity_net)),
      params_(params),
      dt_(1.0 / params.rate_hz),
      wrist_kf_(params.filter),
      pocket_kf_(params.filter),
      pose_runner_(pose_net_),
      velocity_runner_(velocity_net_) {
    // The session opens from the calibration T-pose; that pose seeds the
    // learnable recurrent-state initializer.
    pose_runner_.reset(Vec(flatten_pose_6d(JointRotations{})));
    velocity_runner_.reset();
}

MotionState Engine::process(const SensorPacket& wrist, const SensorPacket& pocket) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Rot3 raw_lw = orientation_matrix(wrist);
        const Rot3 raw_rp = orientation_matrix(pocket);

        RawFrame raw;
        raw.r_lw = Rot3{profile_.world_yaw.m * raw_lw.m * profile_.wrist_offset.m};
        raw.r_rp = Rot3{profile_.world_yaw.m * raw_rp.m * profile_.pocket_offset.m};
        raw.a_lw = profile_.world_yaw.m *
                   (raw_lw.m * Vec3(wrist.acc[0], wrist.acc[1], wrist.acc[2]));
        raw.a_rp = profile_.world_yaw.m *
                   (raw_rp.m * Vec3(pocket.acc[0], pocket.acc[1], pocket.acc[2]));
        if (params_.subtract_gravity) {
            raw.a_lw.y() -= kGravityMps2;
            raw.a_rp.y() -= kGravityMps2;
        }

        wrist_kf_.predict(raw.a_lw.y(), dt_);
        pocket_kf_.predict(raw.a_rp.y(), dt_);
        const double h_lw_abs =
            wrist_kf_.update(pressure_to_height(wrist.pressure_hpa, profile_.wrist));
        const double h_rp_abs =
            pocket_kf_.update(pressure_to_height(pocket.pressure_hpa, profile_.pocket));
        raw.h_lw = h_lw_abs - profile_.ground_height;
        raw.h_rp = h_rp_abs - profile_.ground_height;
        raw.t = static_cast<double>(frames_) * dt_;

        if (frames_ == 0) prev_raw_ = raw;
        const PoseFeature pose_feat = build_pose_input(raw, prev_raw_, dt_).flatten();
        const TransFeature trans_feat = build_trans_input(raw).flatten();

        const Vec pose_out = pose_runner_.step(Vec(pose_feat));
        const Vec2 v_xz = velocity_runner_.step(Vec(trans_feat));

        const JointRotations theta_local = unflatten_pose_6d(PoseVector(pose_out));
        MotionState state;
        state.theta = localize_pose_output(theta_local, raw.r_rp);
        const double h_loc = thigh_local_height(state.theta, skel_);
        if (frames_ == 0) {
            h_glb_0_ = raw.h_rp;
            h_loc_0_ = h_loc;
        }
        t_xz_ += v_xz * dt_;
        state.t_xz = t_xz_;
        state.t_y = vertical_translation(raw.h_rp, h_glb_0_, h_loc, h_loc_0_);
        state.t = raw.t;

        prev_raw_ = raw;
        ++frames_;
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (latencies_ms_.size() < kLatencyLogCap) {
            latencies_ms_.push_back(ms);
        } else {
            latencies_ms_[static_cast<size_t>(frames_) % kLatencyLogCap] = ms;
        }
        return state;
    } catch (const Error& e) {
        throw Error(e.code(), "frame " + std::to_string(frames_) + ": " + e.detail());
    }
}

MotionState Engine::process(const AlignedFrame& frame) {
    SensorPacket wrist = frame.wrist;
    SensorPacket pocket = frame.pocket;
    if (frame.wrist_degraded) {
        wrist.acc = {0.0F, 0.0F, 0.0F};
    }
    if (frame.pocket_degraded) {
        pocket.acc = {0.0F, 0.0F, 0.0F};
    }
    if (frame.wrist_degraded || frame.pocket_degraded) ++degraded_ticks_;
    return process(wrist, pocket);
}

Engine make_engine(const SessionConfig& cfg, const CalibProfile* profile_override) {
    CalibProfile profile;
    if (profile_override) {
        profile = *profile_override;
    } else if (!cfg.calib_path.empty()) {
        profile = CalibProfile::load(cfg.calib_path);
    } else {
        throw ConfigError("no calibration profile configured");
    }
    Skeleton skel =
        cfg.skeleton_path.empty() ? Skeleton::mean_shape() : Skeleton::load(cfg.skeleton_path);
    if (cfg.pose_checkpoint.empty() || cfg.velocity_checkpoint.empty()) {
        throw ConfigError("pose and velocity checkpoints must be configured");
    }
    PoseNet pose_net = load_pose_net(cfg.pose_checkpoint);
    VelocityNet velocity_net = load_velocity_net(cfg.velocity_checkpoint);
    EngineParams params;
    params.rate_hz = cfg.rate_hz;
    params.subtract_gravity = cfg.subtract_gravity;
    params.filter = cfg.filter;
    return Engine(std::move(profile), std::move(skel), std::move(pose_net),
                  std::move(velocity_net), params);
}

std::vector<TimedPacket> packets_from_sequence(const SynthSequence& seq,
                                               const CalibProfile& profile,
                                               std::uint64_t start_us) {
    std::vector<TimedPacket> packets;
    packets.reserve(seq.frames.size() * 2);
    const auto period_us = static_cast<std::uint64_t>(std::llround(1e6 / seq.fps));
    constexpr std::uint64_t kTransportLatencyUs = 2000;
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        const RawFrame& raw = seq.frames[i].raw;
        const std::uint64_t ts = start_us + static_cast<std::uint64_t>(i) * period_us;

        SensorPacket wrist;
        wrist.device_id = kDeviceWrist;
        wrist.seq = static_cast<std::uint32_t>(i);
        wrist.timestamp_us = ts;
        const Vec3 a_dev_lw = raw.r_lw.m.transpose() * raw.a_lw;
        wrist.acc = {static_cast<float>(a_dev_lw.x()), static_cast<float>(a_dev_lw.y()),
                     static_cast<float>(a_dev_lw.z())};
        wrist.orient_wxyz = quaternion_wxyz(raw.r_lw);
        wrist.pressure_hpa = static_cast<float>(
            height_to_pressure(raw.h_lw + profile.ground_height, profile.wrist));

        SensorPacket pocket;
        pocket.device_id = kDevicePocket;
        pocket.seq = static_cast<std::uint32_t>(i);
        pocket.timestamp_us = ts;
        const Vec3 a_dev_rp = raw.r_rp.m.transpose() * raw.a_rp;
        pocket.acc = {static_cast<float>(a_dev_rp.x()), static_cast<float>(a_dev_rp.y()),
                      static_cast<float>(a_dev_rp.z())};
        pocket.orient_wxyz = quaternion_wxyz(raw.r_rp);
        pocket.pressure_hpa = static_cast<float>(
            height_to_pressure(raw.h_rp + profile.ground_height, profile.pocket));

        packets.push_back(TimedPacket{wrist, ts + kTransportLatencyUs});
        packets.push_back(TimedPacket{pocket, ts + kTransportLatencyUs});
    }
    return packets;
}

std::vector<MotionState> replay_record(const RecordFile& record, const SessionConfig& cfg) {
    CalibProfile profile;
    const CalibProfile* override_ptr = nullptr;
    if (!record.header.calib_text.empty()) {
        profile = CalibProfile::from_text(record.header.calib_text);
        override_ptr = &profile;
    }
    Engine engine = make_engine(cfg, override_ptr);

    StreamAligner aligner(cfg.rate_hz);
    std::vector<MotionState> states;
    std::uint64_t last_recv = 0;
    for (const TimedPacket& pkt : record.packets) {
        aligner.push(pkt);
        for (const AlignedFrame& frame : aligner.poll(pkt.recv_us)) {
            states.push_back(engine.process(frame));
        }
        last_recv = std::max(last_recv, pkt.recv_us);
    }
    // Flush ticks that became due between the last packet and stream end.
    for (const AlignedFrame& frame : aligner.poll(last_recv + 40000)) {
        states.push_back(engine.process(frame));
    }
    return states;
}

void write_motion_text(std::ostream& out, const std::vector<MotionState>& states) {
    out.precision(17);
    for (size_t i = 0; i < states.size(); ++i) {
        const MotionState& s = states[i];
        out << i << " " << s.t << " " << s.t_xz.x() << " " << s.t_y << " " << s.t_xz.y();
        for (const Rot3& r : s.theta) {
            const Vec3 aa = log_so3(r);
            out << " " << aa.x() << " " << aa.y() << " " << aa.z();
        }
        out << "\n";
    }
}

void write_motion_binary(std::ostream& out, const std::vector<MotionState>& states) {
    const char magic[4] = {'B', 'M', 'M', 'L'};
    out.write(magic, 4);
    auto put_u32 = [&](std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    auto put_f64 = [&](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
        out.write(reinterpret_cast<const char*>(b), 8);
    };
    put_u32(1);
    put_u32(static_cast<std::uint32_t>(states.size()));
    for (const MotionState& s : states) {
        put_f64(s.t);
        put_f64(s.t_xz.x());
        put_f64(s.t_y);
        put_f64(s.t_xz.y());
        for (const Rot3& r : s.theta) {
            for (int c = 0; c < 3; ++c)
                for (int row = 0; row < 3; ++row) put_f64(r.m(row, c));
        }
    }
}

std::vector<MotionState> read_motion_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "BMML", 4) != 0) {
        throw BadMagic("not a motion log");
    }
    auto get_u32 = [&]() -> std::uint32_t {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4)) throw CorruptFile("truncated motion log");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    };
    auto get_f64 = [&]() -> double {
        unsigned char b[8];
        if (!in.read(reinterpret_cast<char*>(b), 8)) throw CorruptFile("truncated motion log");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != 1) throw VersionMismatch("motion log version " + std::to_string(version));
    const std::uint32_t count = get_u32();
    std::vector<MotionState> states(count);
    for (MotionState& s : states) {
        s.t = get_f64();
        s.t_xz.x() = get_f64();
        s.t_y = get_f64();
        s.t_xz.y() = get_f64();
        for (Rot3& r : s.theta) {
            for (int c = 0; c < 3; ++c)
                for (int row = 0; row < 3; ++row) r.m(row, c) = get_f64();
        }
    }
    return states;
}

SequenceEval run_estimators(const SynthSequence& seq, const PoseNet& pose_net,
                            const VelocityNet& velocity_net, const Skeleton& skel) {
    SequenceEval out;
    if (seq.frames.empty()) return out;
    const double dt = 1.0 / seq.fps;

    PoseRunner pose_runner(pose_net);
    VelocityRunner velocity_runner(velocity_net);
    pose_runner.reset(Vec(flatten_pose_6d(
        delocalize_pose(seq.frames[0].gt_pose, seq.frames[0].raw.r_rp))));
    velocity_runner.reset();

    Vec2 t_xz = Vec2::Zero();
    double h_glb_0 = seq.frames[0].raw.h_rp;
    double h_loc_0 = 0.0;
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        const RawFrame& raw = seq.frames[i].raw;
        const RawFrame& prev = seq.frames[i == 0 ? 0 : i - 1].raw;
        const Vec pose_out = pose_runner.step(Vec(build_pose_input(raw, prev, dt).flatten()));
        const Vec2 v = velocity_runner.step(Vec(build_trans_input(raw).flatten()));

        const JointRotations theta_world =
            localize_pose_output(unflatten_pose_6d(PoseVector(pose_out)), raw.r_rp);
        const double h_loc = thigh_local_height(theta_world, skel);
        if (i == 0) h_loc_0 = h_loc;
        t_xz += v * dt;
        const double t_y = vertical_translation(raw.h_rp, h_glb_0, h_loc, h_loc_0);

        out.pred_pose.push_back(theta_world);
        out.gt_pose.push_back(seq.frames[i].gt_pose);
        out.pred_translation.emplace_back(t_xz.x(), t_y, t_xz.y());
        out.gt_translation.push_back(seq.frames[i].gt_root - seq.frames[0].gt_root);
    }
    return out;
}

std::vector<MotionState> ground_truth_motion(const SynthSequence& seq) {
    std::vector<MotionState> states;
    states.reserve(seq.frames.size());
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        const SynthFrame& f = seq.frames[i];
        MotionState s;
        s.theta = f.gt_pose;
        const Vec3 d = f.gt_root - seq.frames[0].gt_root;
        s.t_xz = Vec2(d.x(), d.z());
        s.t_y = d.y();
        s.t = f.raw.t;
        states.push_back(s);
    }
    return states;
}

LiveStats run_live(const SessionConfig& cfg, double duration_s,
                   const std::function<void(const MotionState&)>& on_state) {
    Engine engine = make_engine(cfg);
    const Endpoint ep = parse_endpoint(cfg.listen);

    StreamAligner aligner(cfg.rate_hz);
    std::mutex aligner_mutex;
    BoundedQueue<AlignedFrame> queue(64);

    auto on_packet = [&](const TimedPacket& pkt) {
        std::vector<AlignedFrame> frames;
        {
            std::lock_guard lock(aligner_mutex);
            aligner.push(pkt);
            frames = aligner.poll(pkt.recv_us);
        }
        for (const AlignedFrame& f : frames) queue.push(f);
    };

    std::unique_ptr<UdpSource> udp;
    std::unique_ptr<TcpSource> tcp;
    if (ep.udp) {
        udp = std::make_unique<UdpSource>(ep.host, ep.port);
        udp->start(on_packet);
    } else {
        tcp = std::make_unique<TcpSource>(ep.host, ep.port);
        tcp->start(on_packet);
    }

    LiveStats stats;
    const auto t_end =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(duration_s);
    while (std::chrono::steady_clock::now() < t_end) {
        if (auto frame = queue.pop(std::chrono::milliseconds(50))) {
            on_state(engine.process(*frame));
            ++stats.frames;
        } else {
            // Starved stream: keep the engine clock ticking on held samples.
            std::vector<AlignedFrame> frames;
            {
                std::lock_guard lock(aligner_mutex);
                frames = aligner.poll(engine_now_us());
            }
            for (const AlignedFrame& f : frames) queue.push(f);
        }
    }
    if (udp) udp->stop();
    if (tcp) tcp->stop();

    stats.queue_dropped = queue.dropped();
    {
        std::lock_guard lock(aligner_mutex);
        stats.reorder_missing =
            aligner.wrist_buffer().missing() + aligner.pocket_buffer().missing();
        stats.reorder_late = aligner.wrist_buffer().late_dropped() +
                             aligner.pocket_buffer().late_dropped();
    }
    return stats;
}

LiveStats record_live(const SessionConfig& cfg, const std::string& out_path,
                      double duration_s) {
    const Endpoint ep = parse_endpoint(cfg.listen);
    RecordHeader header;
    header.start_us = engine_now_us();
    if (!cfg.calib_path.empty()) {
        header.calib_text = CalibProfile::load(cfg.calib_path).to_text();
    }
    RecordWriter writer(out_path, header);
    std::mutex writer_mutex;
    LiveStats stats;

    auto on_packet = [&](const TimedPacket& pkt) {
        std::lock_guard lock(writer_mutex);
        writer.append(pkt);
        ++stats.frames;
    };

    std::unique_ptr<UdpSource> udp;
    std::unique_ptr<TcpSource> tcp;
    if (ep.udp) {
        udp = std::make_unique<UdpSource>(ep.host, ep.port);
        udp->start(on_packet);
    } else {
        tcp = std::make_unique<TcpSource>(ep.host, ep.port);
        tcp->start(on_packet);
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(duration_s));
    if (udp) udp->stop();
    if (tcp) tcp->stop();
    writer.flush();
    return stats;
}

}  // namespace baromocap
