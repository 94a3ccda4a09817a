#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "baromocap/ingest.hpp"

namespace baromocap {

/// Session recording: header with a calibration snapshot, then an
/// append-only log of packets in arrival order with their receive times.
/// Replaying a record through the engine is bit-stable.
struct RecordHeader {
    std::uint32_t version = 1;
    std::uint8_t device_count = 2;
    std::uint64_t start_us = 0;
    std::string calib_text;  // embedded calibration profile (may be empty)
};

class RecordWriter {
public:
    RecordWriter(const std::string& path, const RecordHeader& header);
    void append(const TimedPacket& pkt);
    void flush();

private:
    std::ofstream out_;
    std::string path_;
};

struct RecordFile {
    RecordHeader header;
    std::vector<TimedPacket> packets;
};

RecordFile read_record(const std::string& path);

}  // namespace baromocap
