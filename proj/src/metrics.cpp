#include "baromocap/metrics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "baromocap/errors.hpp"

namespace baromocap {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

std::vector<int> non_root_joints() {
    std::vector<int> joints;
    joints.reserve(kNumJoints - 1);
    for (int j = 1; j < kNumJoints; ++j) joints.push_back(j);
    return joints;
}

double angular_error_deg(const std::array<Rot3, kNumJoints>& pred_global,
                         const std::array<Rot3, kNumJoints>& gt_global,
                         const std::vector<int>& joint_subset) {
    if (joint_subset.empty()) throw DegenerateInput("angular_error: empty joint subset");
    double acc = 0.0;
    for (int j : joint_subset) {
        const auto i = static_cast<size_t>(j);
        acc += geodesic_angle(gt_global[i], pred_global[i]);
    }
    return kRadToDeg * acc / static_cast<double>(joint_subset.size());
}

double positional_error_cm(const JointRotations& pred_pose, const JointRotations& gt_pose,
                           const Skeleton& skel) {
    const FkResult pred = fk(pred_pose, skel);
    const FkResult gt = fk(gt_pose, skel);
    // fk puts the pelvis at the origin for both, so the root is aligned.
    double acc = 0.0;
    for (int j = 1; j < kNumJoints; ++j) {
        const auto i = static_cast<size_t>(j);
        acc += (pred.positions[i] - gt.positions[i]).norm();
    }
    return 100.0 * acc / static_cast<double>(kNumJoints - 1);
}

PoseErrorReport evaluate_pose_sequence(const std::vector<JointRotations>& pred,
                                       const std::vector<JointRotations>& gt,
                                       const Skeleton& skel) {
    if (pred.size() != gt.size()) {
        throw LengthMismatch("evaluate_pose_sequence: sequence lengths differ");
    }
    PoseErrorReport report;
    const std::vector<int> all = non_root_joints();
    for (size_t i = 0; i < pred.size(); ++i) {
        const auto pred_global = global_orientations(pred[i], skel);
        const auto gt_global = global_orientations(gt[i], skel);
        report.sip_series.push_back(angular_error_deg(pred_global, gt_global, kSipJoints));
        report.ang_series.push_back(angular_error_deg(pred_global, gt_global, all));
        report.pos_series.push_back(positional_error_cm(pred[i], gt[i], skel));
    }
    auto mean = [](const std::vector<double>& xs) {
        if (xs.empty()) return 0.0;
        double acc = 0.0;
        for (double x : xs) acc += x;
        return acc / static_cast<double>(xs.size());
    };
    report.sip_deg = mean(report.sip_series);
    report.ang_deg = mean(report.ang_series);
    report.pos_cm = mean(report.pos_series);
    return report;
}

TranslationErrorCurve cumulative_translation_error(const std::vector<Vec3>& pred,
                                                   const std::vector<Vec3>& gt,
                                                   double bin_m, int window_stride) {
    if (pred.size() != gt.size()) {
        throw LengthMismatch("cumulative_translation_error: trajectory lengths differ");
    }
    if (bin_m <= 0.0 || window_stride < 1) {
        throw DegenerateInput("cumulative_translation_error: bad bin size or stride");
    }
    const size_t n = gt.size();
    TranslationErrorCurve curve;
    curve.bin_m = bin_m;
    if (n == 0) return curve;

    // Arc length along the ground-truth path.
    std::vector<double> arc(n, 0.0);
    for (size_t i = 1; i < n; ++i) {
        arc[i] = arc[i - 1] + (gt[i] - gt[i - 1]).norm();
    }
    const auto max_bin = static_cast<size_t>(std::floor(arc.back() / bin_m + 1e-12));
    curve.mean_err_m.assign(max_bin + 1, 0.0);
    curve.counts.assign(max_bin + 1, 0);

    for (size_t start = 0; start < n; start += static_cast<size_t>(window_stride)) {
        size_t at = start;
        for (size_t k = 0; k <= max_bin; ++k) {
            const double target = arc[start] + static_cast<double>(k) * bin_m;
            while (at < n && arc[at] < target - 1e-12) ++at;
            if (at >= n) break;
            const Vec3 pred_delta = pred[at] - pred[start];
            const Vec3 gt_delta = gt[at] - gt[start];
            curve.mean_err_m[k] += (pred_delta - gt_delta).norm();
            ++curve.counts[k];
        }
    }
    for (size_t k = 0; k < curve.mean_err_m.size(); ++k) {
        if (curve.counts[k] > 0) curve.mean_err_m[k] /= static_cast<double>(curve.counts[k]);
    }
    return curve;
}

std::string format_report(const PoseErrorReport& report) {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed;
    out << "metric\tvalue\tunit\n";
    out << "sip_err\t" << report.sip_deg << "\tdeg\n";
    out << "ang_err\t" << report.ang_deg << "\tdeg\n";
    out << "pos_err\t" << report.pos_cm << "\tcm\n";
    out << "mesh_err\tn/a\tcm\n";
    return out.str();
}

}  // namespace baromocap
