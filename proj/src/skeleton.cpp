#include "baromocap/skeleton.hpp"

#include <fstream>
#include <sstream>

#include "baromocap/errors.hpp"

namespace baromocap {

namespace {

struct JointSpec {
    const char* name;
    int parent;
    double x, y, z;
};

// Mean-shape rest offsets (meters). T-pose, y up, facing -z, left on -x.
constexpr JointSpec kMeanShape[kNumJoints] = {
    {"pelvis", -1, 0.000, 0.000, 0.000},
    {"left_hip", 0, -0.070, -0.085, 0.000},
    {"right_hip", 0, 0.070, -0.085, 0.000},
    {"spine1", 0, 0.000, 0.110, 0.000},
    {"left_knee", 1, 0.000, -0.380, 0.000},
    {"right_knee", 2, 0.000, -0.380, 0.000},
    {"spine2", 3, 0.000, 0.135, 0.000},
    {"left_ankle", 4, 0.000, -0.400, 0.000},
    {"right_ankle", 5, 0.000, -0.400, 0.000},
    {"spine3", 6, 0.000, 0.055, 0.000},
    {"left_foot", 7, 0.000, -0.060, -0.120},
    {"right_foot", 8, 0.000, -0.060, -0.120},
    {"neck", 9, 0.000, 0.210, 0.000},
    {"left_collar", 9, -0.080, 0.120, 0.000},
    {"right_collar", 9, 0.080, 0.120, 0.000},
    {"head", 12, 0.000, 0.070, 0.000},
    {"left_shoulder", 13, -0.100, 0.040, 0.000},
    {"right_shoulder", 14, 0.100, 0.040, 0.000},
    {"left_elbow", 16, -0.260, 0.000, 0.000},
    {"right_elbow", 17, 0.260, 0.000, 0.000},
    {"left_wrist", 18, -0.250, 0.000, 0.000},
    {"right_wrist", 19, 0.250, 0.000, 0.000},
    {"left_hand", 20, -0.080, 0.000, 0.000},
    {"right_hand", 21, 0.080, 0.000, 0.000},
};

}  // namespace

Skeleton Skeleton::mean_shape() {
    Skeleton s;
    s.joints_.reserve(kNumJoints);
    for (const JointSpec& j : kMeanShape) {
        s.joints_.push_back(Joint{j.name, j.parent, Vec3(j.x, j.y, j.z)});
    }
    s.resolve_sites();
    s.validate();
    return s;
}

int Skeleton::index_of(const std::string& name) const {
    for (int i = 0; i < joint_count(); ++i) {
        if (joints_[static_cast<size_t>(i)].name == name) return i;
    }
    return -1;
}

void Skeleton::resolve_sites() {
    left_wrist_ = index_of("left_wrist");
    right_hip_ = index_of("right_hip");
    right_knee_ = index_of("right_knee");
    left_foot_ = index_of("left_foot");
    right_foot_ = index_of("right_foot");
}

void Skeleton::validate() const {
    if (joint_count() != kNumJoints) {
        throw CorruptFile("skeleton must have exactly 24 joints, got " +
                          std::to_string(joint_count()));
    }
    for (int i = 0; i < joint_count(); ++i) {
        const Joint& j = joints_[static_cast<size_t>(i)];
        if ((i == 0) != (j.parent < 0)) {
            throw CorruptFile("joint " + j.name + ": only the root may lack a parent");
        }
        if (j.parent >= i) {
            throw CorruptFile("joint " + j.name + ": parents must precede children");
        }
        if (!j.offset.allFinite()) {
            throw CorruptFile("joint " + j.name + ": non-finite offset");
        }
    }
    if (left_wrist_ < 0 || right_hip_ < 0 || right_knee_ < 0 || left_foot_ < 0 ||
        right_foot_ < 0) {
        throw CorruptFile("skeleton is missing a named sensor/foot site joint");
    }
    if (!(thigh_site_fraction_ >= 0.0 && thigh_site_fraction_ <= 1.0)) {
        throw CorruptFile("thigh site fraction must lie in [0, 1]");
    }
}

// Text format:
//   joints 24
//   thigh_site_fraction 0.5
//   <index> <name> <parent> <ox> <oy> <oz>   (24 rows)
Skeleton Skeleton::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open skeleton file " + path);

    Skeleton s;
    std::string line;
    int expected = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string head;
        ss >> head;
        if (head == "joints") {
            ss >> expected;
        } else if (head == "thigh_site_fraction") {
            ss >> s.thigh_site_fraction_;
        } else {
            int index = std::stoi(head);
            Joint j;
            ss >> j.name >> j.parent >> j.offset.x() >> j.offset.y() >> j.offset.z();
            if (!ss || index != static_cast<int>(s.joints_.size())) {
                throw CorruptFile("malformed skeleton row: " + line);
            }
            s.joints_.push_back(j);
        }
    }
    if (expected >= 0 && expected != static_cast<int>(s.joints_.size())) {
        throw CorruptFile("skeleton row count does not match header");
    }
    s.resolve_sites();
    s.validate();
    return s;
}

void Skeleton::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write skeleton file " + path);
    out << "joints " << joint_count() << "\n";
    out << "thigh_site_fraction " << thigh_site_fraction_ << "\n";
    out.precision(17);
    for (int i = 0; i < joint_count(); ++i) {
        const Joint& j = joints_[static_cast<size_t>(i)];
        out << i << " " << j.name << " " << j.parent << " " << j.offset.x() << " "
            << j.offset.y() << " " << j.offset.z() << "\n";
    }
}

}  // namespace baromocap
