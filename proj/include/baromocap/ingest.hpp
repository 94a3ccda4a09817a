#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "baromocap/wire_protocol.hpp"

namespace baromocap {

struct TimedPacket {
    SensorPacket pkt;
    std::uint64_t recv_us = 0;  // arrival time on the engine clock
};

/// Per-device sequence reordering. Packets are emitted strictly in-seq; a
/// gap is skipped (and counted as missing) once the packet stuck behind it
/// has waited longer than the reorder window. Late and duplicate packets
/// are dropped with counters.
class ReorderBuffer {
public:
    explicit ReorderBuffer(std::uint64_t window_us = 100000) : window_us_(window_us) {}

    void push(const TimedPacket& pkt);
    std::vector<TimedPacket> drain(std::uint64_t now_us);

    std::uint64_t late_dropped() const { return late_dropped_; }
    std::uint64_t duplicates() const { return duplicates_; }
    std::uint64_t missing() const { return missing_; }

private:
    std::uint64_t window_us_;
    std::map<std::uint32_t, TimedPacket> pending_;
    std::uint32_t next_seq_ = 0;
    bool started_ = false;
    std::uint64_t late_dropped_ = 0;
    std::uint64_t duplicates_ = 0;
    std::uint64_t missing_ = 0;
};

struct AlignedFrame {
    SensorPacket wrist;
    SensorPacket pocket;
    std::uint64_t tick_us = 0;
    bool wrist_degraded = false;
    bool pocket_degraded = false;
};

/// Aligns both device streams to the fixed-rate engine clock with zero-order
/// hold. Ticks start once both devices have produced at least one packet; a
/// device that has been silent for longer than the starvation limit is
/// flagged degraded (the held sample keeps flowing).
class StreamAligner {
public:
    explicit StreamAligner(double rate_hz = 30.0, std::uint64_t reorder_window_us = 100000,
                           std::uint64_t starvation_us = 500000);

    void push(const TimedPacket& pkt);  // routes by pkt.pkt.device_id
    std::vector<AlignedFrame> poll(std::uint64_t now_us);

    const ReorderBuffer& wrist_buffer() const { return wrist_; }
    const ReorderBuffer& pocket_buffer() const { return pocket_; }

private:
    std::uint64_t period_us_;
    std::uint64_t starvation_us_;
    ReorderBuffer wrist_;
    ReorderBuffer pocket_;
    std::optional<SensorPacket> last_wrist_;
    std::optional<SensorPacket> last_pocket_;
    std::uint64_t last_wrist_recv_ = 0;
    std::uint64_t last_pocket_recv_ = 0;
    std::uint64_t next_tick_us_ = 0;
    bool ticking_ = false;
};

/// Bounded handoff between the ingestion and compute stages. When full the
/// oldest entry is dropped (counted) so ingestion never blocks on inference.
template <class T>
class BoundedQueue {
public:
    explicit BoundedQueue(size_t capacity) : capacity_(capacity) {}

    void push(T item) {
        std::lock_guard lock(mutex_);
        if (items_.size() >= capacity_) {
            items_.pop_front();
            ++dropped_;
        }
        items_.push_back(std::move(item));
        ready_.notify_one();
    }

    std::optional<T> pop(std::chrono::milliseconds wait) {
        std::unique_lock lock(mutex_);
        if (!ready_.wait_for(lock, wait, [&] { return !items_.empty() || closed_; })) {
            return std::nullopt;
        }
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        return item;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        ready_.notify_all();
    }

    bool closed() const {
        std::lock_guard lock(mutex_);
        return closed_ && items_.empty();
    }

    std::uint64_t dropped() const {
        std::lock_guard lock(mutex_);
        return dropped_;
    }

private:
    size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<T> items_;
    std::uint64_t dropped_ = 0;
    bool closed_ = false;
};

using PacketCallback = std::function<void(const TimedPacket&)>;

/// Datagram listener: one packet per datagram, decoded and timestamped on
/// arrival. Runs its own receive thread until stop().
class UdpSource {
public:
    UdpSource(const std::string& bind_addr, std::uint16_t port);
    ~UdpSource();

    void start(PacketCallback on_packet);
    void stop();
    std::uint16_t port() const { return port_; }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
    std::thread worker_;
    std::atomic<bool> running_{false};
};

/// Stream listener: accepts one connection at a time and reframes the byte
/// stream into packets.
class TcpSource {
public:
    TcpSource(const std::string& bind_addr, std::uint16_t port);
    ~TcpSource();

    void start(PacketCallback on_packet);
    void stop();
    std::uint16_t port() const { return port_; }

private:
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::thread worker_;
    std::atomic<bool> running_{false};
};

/// Microseconds on the engine's monotonic clock.
std::uint64_t engine_now_us();

}  // namespace baromocap
