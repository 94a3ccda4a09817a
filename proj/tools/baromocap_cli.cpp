// Command-line front end: dataset synthesis, training, evaluation,
// calibration, live capture, record and replay.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "baromocap/metrics.hpp"
#include "baromocap/pipeline.hpp"

namespace {

using namespace baromocap;

Skeleton load_skeleton(const std::string& path) {
    return path.empty() ? Skeleton::mean_shape() : Skeleton::load(path);
}

std::vector<MotionClip> gather_clips(const Skeleton& skel,
                                     const std::vector<std::string>& clip_files,
                                     double seconds, int variants, std::uint64_t seed) {
    if (!clip_files.empty()) {
        std::vector<MotionClip> clips;
        for (const std::string& path : clip_files) clips.push_back(load_clip(path));
        return clips;
    }
    return make_clip_suite(skel, seed, variants, seconds);
}

int cmd_synth(const std::string& out_path, const std::vector<std::string>& clip_files,
              double seconds, int variants, std::uint64_t seed, double noise_std,
              const std::string& skeleton_path, const std::string& export_motion,
              const std::string& record_path, const std::string& calib_path) {
    const Skeleton skel = load_skeleton(skeleton_path);
    const auto clips = gather_clips(skel, clip_files, seconds, variants, seed);

    std::vector<SynthSequence> sequences;
    for (size_t i = 0; i < clips.size(); ++i) {
        SynthOptions opt;
        opt.height_noise_std = noise_std;
        opt.seed = seed + 1000 + i;
        sequences.push_back(synthesize(clips[i], skel, opt, clips[i].subject));
    }
    write_dataset(sequences, out_path);
    std::cout << "wrote " << sequences.size() << " sequences to " << out_path << "\n";

    if (!export_motion.empty()) {
        if (sequences.size() != 1) {
            throw ConfigError("--export-motion needs a single-sequence dataset");
        }
        std::ofstream out(export_motion, std::ios::binary);
        if (!out) throw IoError("cannot write " + export_motion);
        write_motion_binary(out, ground_truth_motion(sequences[0]));
        std::cout << "wrote ground-truth motion to " << export_motion << "\n";
    }
    if (!record_path.empty()) {
        if (sequences.size() != 1) {
            throw ConfigError("--record needs a single-sequence dataset");
        }
        CalibProfile profile;
        if (!calib_path.empty()) profile = CalibProfile::load(calib_path);
        RecordHeader header;
        header.start_us = 1000000;
        header.calib_text = profile.to_text();
        RecordWriter writer(record_path, header);
        for (const TimedPacket& pkt : packets_from_sequence(sequences[0], profile)) {
            writer.append(pkt);
        }
        std::cout << "wrote session record to " << record_path << "\n";
    }
    return 0;
}

int cmd_train(const std::string& net_kind, const std::string& dataset_path,
              const std::string& out_path, TrainConfig cfg, int hidden, int layers,
              int stride) {
    const auto sequences = read_dataset(dataset_path);
    const WindowSets windows = build_windows(sequences, cfg.seq_len, stride);
    const auto progress = [](int epoch, double loss) {
        std::cout << "epoch " << epoch << " loss " << loss << std::endl;
    };

    if (net_kind == "pose") {
        if (windows.pose.empty()) throw TooShort("dataset yields no pose windows");
        PoseNet net = PoseNet::create(cfg.seed, kPoseInputDim, hidden, layers,
                                      kPoseOutputDim, kPoseOutputDim);
        const TrainReport report = train_pose(net, windows.pose, cfg, progress);
        save_pose_net(net, out_path);
        std::cout << "trained pose net: " << report.steps << " steps, " << report.seconds
                  << " s, final loss "
                  << (report.epoch_mean_loss.empty() ? 0.0 : report.epoch_mean_loss.back())
                  << "\n";
    } else if (net_kind == "velocity") {
        if (windows.velocity.empty()) throw TooShort("dataset yields no velocity windows");
        VelocityNet net = VelocityNet::create(cfg.seed, kTransInputDim, hidden, layers, 2);
        const TrainReport report = train_velocity(net, windows.velocity, cfg, progress);
        save_velocity_net(net, out_path);
        std::cout << "trained velocity net: " << report.steps << " steps, "
                  << report.seconds << " s, final loss "
                  << (report.epoch_mean_loss.empty() ? 0.0 : report.epoch_mean_loss.back())
                  << "\n";
    } else {
        throw ConfigError("--net must be pose or velocity");
    }
    std::cout << "wrote checkpoint to " << out_path << "\n";
    return 0;
}

struct EvalAccumulator {
    std::vector<double> sip, ang, pos;
    TranslationErrorCurve curve;
    bool have_curve = false;

    void add_pose(const PoseErrorReport& r) {
        sip.insert(sip.end(), r.sip_series.begin(), r.sip_series.end());
        ang.insert(ang.end(), r.ang_series.begin(), r.ang_series.end());
        pos.insert(pos.end(), r.pos_series.begin(), r.pos_series.end());
    }

    PoseErrorReport pooled() const {
        PoseErrorReport r;
        auto mean = [](const std::vector<double>& xs) {
            double acc = 0.0;
            for (double x : xs) acc += x;
            return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
        };
        r.sip_deg = mean(sip);
        r.ang_deg = mean(ang);
        r.pos_cm = mean(pos);
        return r;
    }
};

int cmd_eval(const std::string& dataset_path, const std::string& pose_ckpt,
             const std::string& vel_ckpt, const std::string& pred_path,
             const std::string& report_path, const std::string& summary_path,
             const std::string& skeleton_path) {
    const Skeleton skel = load_skeleton(skeleton_path);
    const auto sequences = read_dataset(dataset_path);
    if (sequences.empty()) throw TooShort("dataset is empty");

    EvalAccumulator acc;
    if (!pred_path.empty()) {
        // Score an externally produced motion log against the dataset truth.
        if (sequences.size() != 1) {
            throw ConfigError("--pred needs a single-sequence dataset");
        }
        std::ifstream in(pred_path, std::ios::binary);
        if (!in) throw IoError("cannot open " + pred_path);
        const auto pred = read_motion_binary(in);
        const auto gt = ground_truth_motion(sequences[0]);
        if (pred.size() != gt.size()) {
            throw LengthMismatch("prediction log and dataset frame counts differ");
        }
        std::vector<JointRotations> pred_pose;
        std::vector<JointRotations> gt_pose;
        std::vector<Vec3> pred_tr;
        std::vector<Vec3> gt_tr;
        for (size_t i = 0; i < pred.size(); ++i) {
            pred_pose.push_back(pred[i].theta);
            gt_pose.push_back(gt[i].theta);
            pred_tr.emplace_back(pred[i].t_xz.x(), pred[i].t_y, pred[i].t_xz.y());
            gt_tr.emplace_back(gt[i].t_xz.x(), gt[i].t_y, gt[i].t_xz.y());
        }
        acc.add_pose(evaluate_pose_sequence(pred_pose, gt_pose, skel));
        acc.curve = cumulative_translation_error(pred_tr, gt_tr);
        acc.have_curve = true;
    } else {
        if (pose_ckpt.empty() || vel_ckpt.empty()) {
            throw ConfigError("eval needs --pose-ckpt and --vel-ckpt (or --pred)");
        }
        const PoseNet pose_net = load_pose_net(pose_ckpt);
        const VelocityNet vel_net = load_velocity_net(vel_ckpt);
        for (const SynthSequence& seq : sequences) {
            const SequenceEval ev = run_estimators(seq, pose_net, vel_net, skel);
            acc.add_pose(evaluate_pose_sequence(ev.pred_pose, ev.gt_pose, skel));
            if (!acc.have_curve) {
                acc.curve =
                    cumulative_translation_error(ev.pred_translation, ev.gt_translation);
                acc.have_curve = true;
            }
        }
    }

    const PoseErrorReport pooled = acc.pooled();
    std::string table = format_report(pooled);
    if (acc.have_curve) {
        std::ostringstream extra;
        extra.precision(4);
        extra << std::fixed;
        for (size_t k = 0; k < acc.curve.mean_err_m.size(); ++k) {
            extra << "trans_err_at_" << (static_cast<double>(k) * acc.curve.bin_m) << "m\t"
                  << acc.curve.mean_err_m[k] << "\tm\n";
        }
        table += extra.str();
    }
    std::cout << table;
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw IoError("cannot write " + report_path);
        out << table;
    }
    if (!summary_path.empty()) {
        std::ofstream out(summary_path);
        if (!out) throw IoError("cannot write " + summary_path);
        out.precision(6);
        out << "sip_deg " << pooled.sip_deg << "\n";
        out << "ang_deg " << pooled.ang_deg << "\n";
        out << "pos_cm " << pooled.pos_cm << "\n";
        out << "mesh_cm n/a\n";
    }
    return 0;
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("range must be start:end seconds");
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

CalibSampleSet window_from_record(const RecordFile& record, CalibLabel label, double t0,
                                  double t1) {
    std::vector<DeviceFrame> wrist;
    std::vector<DeviceFrame> pocket;
    const double base = static_cast<double>(record.header.start_us) / 1e6;
    for (const TimedPacket& tp : record.packets) {
        const double t = static_cast<double>(tp.recv_us) / 1e6 - base;
        if (t < t0 || t > t1) continue;
        DeviceFrame frame;
        frame.t = t;
        frame.orient = orientation_matrix(tp.pkt);
        frame.accel = Vec3(tp.pkt.acc[0], tp.pkt.acc[1], tp.pkt.acc[2]);
        frame.pressure_hpa = tp.pkt.pressure_hpa;
        (tp.pkt.device_id == kDeviceWrist ? wrist : pocket).push_back(frame);
    }
    CalibSampleSet set;
    set.label = label;
    const size_t n = std::min(wrist.size(), pocket.size());
    for (size_t i = 0; i < n; ++i) {
        set.frames.push_back(CalibFramePair{wrist[i], pocket[i]});
    }
    return set;
}

int cmd_calibrate(const std::string& record_path, const std::string& same_height_range,
                  const std::string& tpose_range, const std::string& out_path,
                  double known_dh, double reference_hpa, double initial_scale,
                  const std::string& skeleton_path) {
    const RecordFile record = read_record(record_path);
    const auto [s0, s1] = parse_range(same_height_range);
    const auto [t0, t1] = parse_range(tpose_range);
    const CalibSampleSet same = window_from_record(record, CalibLabel::same_height, s0, s1);
    const CalibSampleSet tpose = window_from_record(record, CalibLabel::t_pose, t0, t1);
    const Skeleton skel = load_skeleton(skeleton_path);
    const CalibProfile profile =
        calibrate(same, tpose, skel, known_dh, reference_hpa, initial_scale);
    profile.save(out_path);
    std::cout << "scale " << profile.pocket.scale_m_per_hpa << " m/hPa, wrist bias "
              << profile.wrist.bias_m << " m, ground " << profile.ground_height << " m\n";
    std::cout << "wrote calibration profile to " << out_path << "\n";
    return 0;
}

void write_states(const SessionConfig& cfg, const std::string& out_override,
                  const std::string& format_override,
                  const std::vector<MotionState>& states) {
    const std::string path = out_override.empty() ? cfg.output_path : out_override;
    const std::string format = format_override.empty() ? cfg.output_format : format_override;
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!path.empty()) {
        file.open(path, format == "binary" ? std::ios::binary : std::ios::out);
        if (!file) throw IoError("cannot write " + path);
        out = &file;
    }
    if (format == "binary") {
        write_motion_binary(*out, states);
    } else {
        write_motion_text(*out, states);
    }
}

int cmd_replay(const std::string& record_path, const std::string& config_path,
               const std::string& out_override, const std::string& format_override) {
    const SessionConfig cfg = SessionConfig::load(config_path);
    const RecordFile record = read_record(record_path);
    const auto states = replay_record(record, cfg);
    write_states(cfg, out_override, format_override, states);
    std::cerr << "replayed " << states.size() << " frames\n";
    return 0;
}

int cmd_run(const std::string& config_path, double seconds) {
    const SessionConfig cfg = SessionConfig::load(config_path);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!cfg.output_path.empty()) {
        file.open(cfg.output_path);
        if (!file) throw IoError("cannot write " + cfg.output_path);
        out = &file;
    }
    const LiveStats stats = run_live(cfg, seconds, [&](const MotionState& s) {
        write_motion_text(*out, {s});
        out->flush();
    });
    std::cerr << "processed " << stats.frames << " frames, queue dropped "
              << stats.queue_dropped << ", reorder missing " << stats.reorder_missing
              << "\n";
    return 0;
}

int cmd_record(const std::string& listen, const std::string& out_path,
               const std::string& calib_path, double seconds) {
    SessionConfig cfg;
    cfg.listen = listen;
    cfg.calib_path = calib_path;
    const LiveStats stats = record_live(cfg, out_path, seconds);
    std::cerr << "recorded " << stats.frames << " packets to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Barometer-assisted two-device motion tracking engine"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic sensor dataset");
    std::string synth_out;
    std::vector<std::string> synth_clips;
    double synth_seconds = 20.0;
    int synth_variants = 2;
    std::uint64_t synth_seed = 1;
    double synth_noise = 0.05;
    std::string synth_skeleton;
    std::string synth_export;
    std::string synth_record;
    std::string synth_calib;
    synth->add_option("--out", synth_out, "Output dataset path")->required();
    synth->add_option("--clip", synth_clips, "Motion clip text file (repeatable)");
    synth->add_option("--seconds", synth_seconds, "Clip length for procedural clips");
    synth->add_option("--variants", synth_variants, "Variants per procedural kind");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--noise-std", synth_noise, "Height noise std in meters");
    synth->add_option("--skeleton", synth_skeleton, "Skeleton file (default: built-in)");
    synth->add_option("--export-motion", synth_export,
                      "Write the ground-truth motion log (single-sequence datasets)");
    synth->add_option("--record", synth_record,
                      "Write a session record of the sequence (single-sequence datasets)");
    synth->add_option("--calib", synth_calib, "Calibration profile for --record");

    auto* train = app.add_subcommand("train", "Train an estimator on a dataset");
    std::string train_net = "pose";
    std::string train_dataset;
    std::string train_out;
    TrainConfig train_cfg;
    int train_hidden = 512;
    int train_layers = 2;
    int train_stride = 150;
    train->add_option("--net", train_net, "pose | velocity")->required();
    train->add_option("--dataset", train_dataset, "Dataset path")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--out", train_out, "Checkpoint output path")->required();
    train->add_option("--epochs", train_cfg.epochs, "Max epochs");
    train->add_option("--batch", train_cfg.batch, "Batch size");
    train->add_option("--lr", train_cfg.lr, "Learning rate");
    train->add_option("--seed", train_cfg.seed, "Seed");
    train->add_option("--seq-len", train_cfg.seq_len, "Window length");
    train->add_option("--stride", train_stride, "Window stride");
    train->add_option("--hidden", train_hidden, "Hidden size");
    train->add_option("--layers", train_layers, "Recurrent layers");
    train->add_option("--budget-sec", train_cfg.budget_seconds, "Wall-clock budget");
    train->add_option("--max-steps", train_cfg.max_steps, "Step cap");
    train->add_option("--target-loss", train_cfg.target_loss, "Early-stop loss");

    auto* eval = app.add_subcommand("eval", "Score estimators or a motion log");
    std::string eval_dataset;
    std::string eval_pose;
    std::string eval_vel;
    std::string eval_pred;
    std::string eval_report;
    std::string eval_summary;
    std::string eval_skeleton;
    eval->add_option("--dataset", eval_dataset, "Dataset path")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--pose-ckpt", eval_pose, "Pose checkpoint");
    eval->add_option("--vel-ckpt", eval_vel, "Velocity checkpoint");
    eval->add_option("--pred", eval_pred, "Motion log to score instead of running nets");
    eval->add_option("--report", eval_report, "Report table output path");
    eval->add_option("--summary", eval_summary, "Machine-readable summary path");
    eval->add_option("--skeleton", eval_skeleton, "Skeleton file");

    auto* calib = app.add_subcommand("calibrate", "Derive a calibration profile");
    std::string calib_record;
    std::string calib_same = "0:5";
    std::string calib_tpose = "5:10";
    std::string calib_out;
    double calib_dh = 0.66;
    double calib_ref = 1013.25;
    double calib_scale = 8.43;
    std::string calib_skeleton;
    calib->add_option("--record", calib_record, "Recorded session")
        ->required()
        ->check(CLI::ExistingFile);
    calib->add_option("--same-height", calib_same, "Window start:end seconds");
    calib->add_option("--tpose", calib_tpose, "Window start:end seconds");
    calib->add_option("--out", calib_out, "Profile output path")->required();
    calib->add_option("--known-dh", calib_dh, "T-pose wrist-pocket offset, meters");
    calib->add_option("--reference-hpa", calib_ref, "Reference pressure");
    calib->add_option("--initial-scale", calib_scale, "Initial pressure scale");
    calib->add_option("--skeleton", calib_skeleton, "Skeleton file");

    auto* record = app.add_subcommand("record", "Record raw packets from a live endpoint");
    std::string record_listen = "udp://0.0.0.0:9101";
    std::string record_out;
    std::string record_calib;
    double record_seconds = 10.0;
    record->add_option("--listen", record_listen, "udp://host:port or tcp://host:port");
    record->add_option("--out", record_out, "Record file")->required();
    record->add_option("--calib", record_calib, "Profile to embed");
    record->add_option("--seconds", record_seconds, "Capture duration");

    auto* run = app.add_subcommand("run", "Run the live engine");
    std::string run_config;
    double run_seconds = 0.0;
    run->add_option("--config", run_config, "Session config")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--seconds", run_seconds, "Duration (0 = run forever)");

    auto* replay = app.add_subcommand("replay", "Replay a recorded session");
    std::string replay_record_path;
    std::string replay_config;
    std::string replay_out;
    std::string replay_format;
    replay->add_option("--record", replay_record_path, "Record file")
        ->required()
        ->check(CLI::ExistingFile);
    replay->add_option("--config", replay_config, "Session config")
        ->required()
        ->check(CLI::ExistingFile);
    replay->add_option("--out", replay_out, "Motion output path");
    replay->add_option("--format", replay_format, "text | binary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth) {
            return cmd_synth(synth_out, synth_clips, synth_seconds, synth_variants,
                             synth_seed, synth_noise, synth_skeleton, synth_export,
                             synth_record, synth_calib);
        }
        if (*train) {
            return cmd_train(train_net, train_dataset, train_out, train_cfg, train_hidden,
                             train_layers, train_stride);
        }
        if (*eval) {
            return cmd_eval(eval_dataset, eval_pose, eval_vel, eval_pred, eval_report,
                            eval_summary, eval_skeleton);
        }
        if (*calib) {
            return cmd_calibrate(calib_record, calib_same, calib_tpose, calib_out, calib_dh,
                                 calib_ref, calib_scale, calib_skeleton);
        }
        if (*record) {
            return cmd_record(record_listen, record_out, record_calib, record_seconds);
        }
        if (*run) {
            return cmd_run(run_config, run_seconds <= 0.0
                                           ? std::numeric_limits<double>::infinity()
                                           : run_seconds);
        }
        if (*replay) {
            return cmd_replay(replay_record_path, replay_config, replay_out, replay_format);
        }
    } catch (const baromocap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: Unhandled: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
