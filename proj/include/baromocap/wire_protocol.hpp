#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "baromocap/rotmath.hpp"

namespace baromocap {

inline constexpr std::size_t kPacketSize = 48;
inline constexpr std::uint8_t kPacketMagic0 = 0xB1;
inline constexpr std::uint8_t kPacketMagic1 = 0x05;
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::uint8_t kDeviceWrist = 0;
inline constexpr std::uint8_t kDevicePocket = 1;

/// Fixed 48-byte little-endian payload:
///   magic(2) version(1) device_id(1) seq(u32) timestamp_us(u64)
///   acc(3 x f32, device frame) orient(4 x f32, unit quaternion wxyz,
///   device->world) pressure(f32, hPa)
struct SensorPacket {
    std::uint8_t device_id = kDeviceWrist;
    std::uint32_t seq = 0;
    std::uint64_t timestamp_us = 0;
    std::array<float, 3> acc = {0.0F, 0.0F, 0.0F};
    std::array<float, 4> orient_wxyz = {1.0F, 0.0F, 0.0F, 0.0F};
    float pressure_hpa = 1013.25F;
};

std::array<std::uint8_t, kPacketSize> encode_packet(const SensorPacket& pkt);

/// Field-exact decode. The quaternion is renormalized when its norm is inside
/// [0.99, 1.01]; outside the band (or with pressure outside (300, 1200) hPa)
/// the packet is rejected. Throws BadMagic / BadVersion / OutOfRange.
SensorPacket decode_packet(std::span<const std::uint8_t> bytes);

/// Non-throwing decode used by the stream framer; fills err when it fails.
std::optional<SensorPacket> try_decode_packet(std::span<const std::uint8_t> bytes,
                                              std::string* err = nullptr);

/// Device orientation as a rotation matrix (quaternions exist only at this
/// wire boundary).
Rot3 orientation_matrix(const SensorPacket& pkt);

/// Inverse boundary conversion for the packet encoder side.
std::array<float, 4> quaternion_wxyz(const Rot3& r);

/// Reassembles fixed-size packets from a byte stream; resynchronizes on the
/// magic pair after junk or a rejected packet.
class PacketFramer {
public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<SensorPacket> next();

    std::uint64_t resync_bytes() const { return resync_bytes_; }
    std::uint64_t rejected_packets() const { return rejected_packets_; }

private:
    std::vector<std::uint8_t> buffer_;
    std::uint64_t resync_bytes_ = 0;
    std::uint64_t rejected_packets_ = 0;
};

}  // namespace baromocap
