#include "baromocap/record.hpp"

#include <cstring>

#include "baromocap/errors.hpp"

namespace baromocap {

namespace {

constexpr char kRecordMagic[4] = {'B', 'M', 'R', 'L'};
constexpr std::uint32_t kRecordVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw CorruptFile("truncated record file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw CorruptFile("truncated record file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

RecordWriter::RecordWriter(const std::string& path, const RecordHeader& header)
    : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot write record file " + path);
    out_.write(kRecordMagic, 4);
    put_u32(out_, kRecordVersion);
    out_.put(static_cast<char>(header.device_count));
    put_u64(out_, header.start_us);
    put_u32(out_, static_cast<std::uint32_t>(header.calib_text.size()));
    out_.write(header.calib_text.data(), static_cast<std::streamsize>(header.calib_text.size()));
}

void RecordWriter::append(const TimedPacket& pkt) {
    put_u64(out_, pkt.recv_us);
    const auto bytes = encode_packet(pkt.pkt);
    out_.write(reinterpret_cast<const char*>(bytes.data()), kPacketSize);
    if (!out_) throw IoError("write failed for record file " + path_);
}

void RecordWriter::flush() { out_.flush(); }

RecordFile read_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open record file " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kRecordMagic, 4) != 0) {
        throw BadMagic("not a record file: " + path);
    }
    RecordFile rec;
    rec.header.version = get_u32(in);
    if (rec.header.version != kRecordVersion) {
        throw VersionMismatch("record file version " + std::to_string(rec.header.version));
    }
    const int devices = in.get();
    if (devices < 0) throw CorruptFile("truncated record file");
    rec.header.device_count = static_cast<std::uint8_t>(devices);
    rec.header.start_us = get_u64(in);
    const std::uint32_t calib_len = get_u32(in);
    rec.header.calib_text.resize(calib_len);
    if (calib_len > 0 && !in.read(rec.header.calib_text.data(), calib_len)) {
        throw CorruptFile("truncated record file in calibration snapshot");
    }
    while (true) {
        std::uint64_t recv_us;
        {
            unsigned char b[8];
            if (!in.read(reinterpret_cast<char*>(b), 8)) {
                if (in.gcount() == 0) break;  // clean end of log
                throw CorruptFile("record file ends mid-entry");
            }
            recv_us = 0;
            for (int i = 0; i < 8; ++i) recv_us |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        }
        std::array<std::uint8_t, kPacketSize> bytes;
        if (!in.read(reinterpret_cast<char*>(bytes.data()), kPacketSize)) {
            throw CorruptFile("record file ends mid-packet");
        }
        rec.packets.push_back(TimedPacket{decode_packet(bytes), recv_us});
    }
    return rec;
}

}  // namespace baromocap
