#include "baromocap/wire_protocol.hpp"

#include <cmath>
#include <cstring>

#include "baromocap/errors.hpp"

namespace baromocap {

namespace {

constexpr double kQuatNormLo = 0.99;
constexpr double kQuatNormHi = 1.01;
constexpr float kPressureLo = 300.0F;
constexpr float kPressureHi = 1200.0F;

void put_u32(std::uint8_t* at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) at[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_u64(std::uint8_t* at, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) at[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_f32(std::uint8_t* at, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(at, bits);
}

std::uint32_t get_u32(const std::uint8_t* at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(at[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::uint8_t* at) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(at[i]) << (8 * i);
    return v;
}

float get_f32(const std::uint8_t* at) {
    const std::uint32_t bits = get_u32(at);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

std::array<std::uint8_t, kPacketSize> encode_packet(const SensorPacket& pkt) {
    std::array<std::uint8_t, kPacketSize> out{};
    out[0] = kPacketMagic0;
    out[1] = kPacketMagic1;
    out[2] = kProtocolVersion;
    out[3] = pkt.device_id;
    put_u32(&out[4], pkt.seq);
    put_u64(&out[8], pkt.timestamp_us);
    for (int i = 0; i < 3; ++i) put_f32(&out[16 + 4 * i], pkt.acc[static_cast<size_t>(i)]);
    for (int i = 0; i < 4; ++i) {
        put_f32(&out[28 + 4 * i], pkt.orient_wxyz[static_cast<size_t>(i)]);
    }
    put_f32(&out[44], pkt.pressure_hpa);
    return out;
}

std::optional<SensorPacket> try_decode_packet(std::span<const std::uint8_t> bytes,
                                              std::string* err) {
    auto fail = [&](const std::string& why) -> std::optional<SensorPacket> {
        if (err) *err = why;
        return std::nullopt;
    };
    if (bytes.size() < kPacketSize) return fail("short buffer");
    if (bytes[0] != kPacketMagic0 || bytes[1] != kPacketMagic1) return fail("magic");
    if (bytes[2] != kProtocolVersion) return fail("version");

    SensorPacket pkt;
    pkt.device_id = bytes[3];
    pkt.seq = get_u32(&bytes[4]);
    pkt.timestamp_us = get_u64(&bytes[8]);
    for (int i = 0; i < 3; ++i) pkt.acc[static_cast<size_t>(i)] = get_f32(&bytes[16 + 4 * i]);
    for (int i = 0; i < 4; ++i) {
        pkt.orient_wxyz[static_cast<size_t>(i)] = get_f32(&bytes[28 + 4 * i]);
    }
    pkt.pressure_hpa = get_f32(&bytes[44]);

    if (!(pkt.pressure_hpa > kPressureLo && pkt.pressure_hpa < kPressureHi)) {
        return fail("pressure");
    }
    double norm = 0.0;
    for (float q : pkt.orient_wxyz) norm += static_cast<double>(q) * q;
    norm = std::sqrt(norm);
    if (!(norm >= kQuatNormLo && norm <= kQuatNormHi)) return fail("quaternion");
    // Renormalize only outside the f32 rounding band so that clean packets
    // round-trip byte-exact and renormalization is idempotent.
    if (std::abs(norm - 1.0) > 1e-6) {
        for (float& q : pkt.orient_wxyz) q = static_cast<float>(q / norm);
    }
    return pkt;
}

SensorPacket decode_packet(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kPacketSize) {
        throw OutOfRange("decode_packet: need 48 bytes, got " +
                         std::to_string(bytes.size()));
    }
    std::string why;
    if (auto pkt = try_decode_packet(bytes, &why)) return *pkt;
    if (why == "magic") throw BadMagic("packet magic bytes do not match");
    if (why == "version") throw BadVersion("unsupported protocol version");
    throw OutOfRange("packet field out of range: " + why);
}

Rot3 orientation_matrix(const SensorPacket& pkt) {
    const double w = pkt.orient_wxyz[0];
    const double x = pkt.orient_wxyz[1];
    const double y = pkt.orient_wxyz[2];
    const double z = pkt.orient_wxyz[3];
    Mat3 m;
    m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return Rot3{m};
}

std::array<float, 4> quaternion_wxyz(const Rot3& r) {
    // Shepperd's method: branch on the largest of trace / diagonal entries.
    const Mat3& m = r.m;
    double w;
    double x;
    double y;
    double z;
    const double tr = m.trace();
    if (tr > 0.0) {
        const double s = std::sqrt(tr + 1.0) * 2.0;
        w = 0.25 * s;
        x = (m(2, 1) - m(1, 2)) / s;
        y = (m(0, 2) - m(2, 0)) / s;
        z = (m(1, 0) - m(0, 1)) / s;
    } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
        const double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
        w = (m(2, 1) - m(1, 2)) / s;
        x = 0.25 * s;
        y = (m(0, 1) + m(1, 0)) / s;
        z = (m(0, 2) + m(2, 0)) / s;
    } else if (m(1, 1) > m(2, 2)) {
        const double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
        w = (m(0, 2) - m(2, 0)) / s;
        x = (m(0, 1) + m(1, 0)) / s;
        y = 0.25 * s;
        z = (m(1, 2) + m(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
        w = (m(1, 0) - m(0, 1)) / s;
        x = (m(0, 2) + m(2, 0)) / s;
        y = (m(1, 2) + m(2, 1)) / s;
        z = 0.25 * s;
    }
    return {static_cast<float>(w), static_cast<float>(x), static_cast<float>(y),
            static_cast<float>(z)};
}

void PacketFramer::feed(std::span<const std::uint8_t> bytes) {
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<SensorPacket> PacketFramer::next() {
    while (buffer_.size() >= kPacketSize) {
        if (buffer_[0] != kPacketMagic0 || buffer_[1] != kPacketMagic1) {
            buffer_.erase(buffer_.begin());
            ++resync_bytes_;
            continue;
        }
        std::string why;
        auto pkt = try_decode_packet(std::span(buffer_.data(), kPacketSize), &why);
        if (pkt) {
            buffer_.erase(buffer_.begin(), buffer_.begin() + kPacketSize);
            return pkt;
        }
        // Valid magic but bad content: skip the magic and rescan.
        buffer_.erase(buffer_.begin(), buffer_.begin() + 2);
        resync_bytes_ += 2;
        ++rejected_packets_;
    }
    return std::nullopt;
}

}  // namespace baromocap
