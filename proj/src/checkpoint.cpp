#include "baromocap/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "baromocap/errors.hpp"
#include "baromocap/feature_builder.hpp"
#include "baromocap/training.hpp"

namespace baromocap {

namespace {

constexpr char kMagic[4] = {'B', 'M', 'N', 'W'};
constexpr std::uint32_t kContainerVersion = 1;
constexpr std::uint8_t kKindPose = 1;
constexpr std::uint8_t kKindVelocity = 2;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw CorruptFile("truncated checkpoint");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

float get_f32(std::istream& in) {
    const std::uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

void write_params(std::ostream& out, std::vector<Eigen::Map<Vec>> views) {
    put_u32(out, static_cast<std::uint32_t>(views.size()));
    for (const auto& view : views) {
        put_u32(out, static_cast<std::uint32_t>(view.size()));
        for (long i = 0; i < view.size(); ++i) {
            put_f32(out, static_cast<float>(view[i]));
        }
    }
}

void read_params(std::istream& in, std::vector<Eigen::Map<Vec>> views,
                 const std::string& path) {
    const std::uint32_t count = get_u32(in);
    if (count != views.size()) {
        throw CorruptFile("checkpoint tensor count mismatch in " + path);
    }
    for (auto& view : views) {
        const std::uint32_t n = get_u32(in);
        if (n != static_cast<std::uint32_t>(view.size())) {
            throw CorruptFile("checkpoint tensor shape mismatch in " + path);
        }
        for (long i = 0; i < view.size(); ++i) {
            view[i] = static_cast<double>(get_f32(in));
        }
    }
}

void write_header(std::ostream& out, std::uint8_t kind) {
    out.write(kMagic, 4);
    put_u32(out, kContainerVersion);
    put_u32(out, kFeatureLayoutVersion);
    out.put(static_cast<char>(kind));
}

void read_header(std::istream& in, std::uint8_t expected_kind, const std::string& path) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw BadMagic("not a weight checkpoint: " + path);
    }
    const std::uint32_t container = get_u32(in);
    if (container != kContainerVersion) {
        throw VersionMismatch("checkpoint container version " + std::to_string(container));
    }
    const std::uint32_t layout = get_u32(in);
    if (layout != kFeatureLayoutVersion) {
        throw VersionMismatch("checkpoint feature layout version " + std::to_string(layout) +
                              ", engine expects " + std::to_string(kFeatureLayoutVersion));
    }
    const int kind = in.get();
    if (kind != expected_kind) {
        throw CorruptFile("checkpoint holds the wrong network kind in " + path);
    }
}

}  // namespace

void save_pose_net(const PoseNet& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path);
    write_header(out, kKindPose);
    put_u32(out, static_cast<std::uint32_t>(net.core.input_dim()));
    put_u32(out, static_cast<std::uint32_t>(net.core.hidden()));
    put_u32(out, static_cast<std::uint32_t>(net.core.num_layers()));
    put_u32(out, static_cast<std::uint32_t>(net.head.output_dim()));
    put_u32(out, static_cast<std::uint32_t>(net.init_encoder.input_dim()));
    write_params(out, param_views(const_cast<PoseNet&>(net)));
    if (!out) throw IoError("write failed for checkpoint " + path);
}

PoseNet load_pose_net(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    read_header(in, kKindPose, path);
    const auto input = static_cast<int>(get_u32(in));
    const auto hidden = static_cast<int>(get_u32(in));
    const auto layers = static_cast<int>(get_u32(in));
    const auto output = static_cast<int>(get_u32(in));
    const auto first_pose = static_cast<int>(get_u32(in));
    PoseNet net = PoseNet::create(0, input, hidden, layers, output, first_pose);
    read_params(in, param_views(net), path);
    return net;
}

void save_velocity_net(const VelocityNet& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path);
    write_header(out, kKindVelocity);
    put_u32(out, static_cast<std::uint32_t>(net.core.input_dim()));
    put_u32(out, static_cast<std::uint32_t>(net.core.hidden()));
    put_u32(out, static_cast<std::uint32_t>(net.core.num_layers()));
    put_u32(out, static_cast<std::uint32_t>(net.head.output_dim()));
    write_params(out, param_views(const_cast<VelocityNet&>(net)));
    if (!out) throw IoError("write failed for checkpoint " + path);
}

VelocityNet load_velocity_net(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    read_header(in, kKindVelocity, path);
    const auto input = static_cast<int>(get_u32(in));
    const auto hidden = static_cast<int>(get_u32(in));
    const auto layers = static_cast<int>(get_u32(in));
    const auto output = static_cast<int>(get_u32(in));
    VelocityNet net = VelocityNet::create(0, input, hidden, layers, output);
    read_params(in, param_views(net), path);
    return net;
}

}  // namespace baromocap
