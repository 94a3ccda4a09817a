#include "baromocap/ingest.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include "baromocap/errors.hpp"

namespace baromocap {

std::uint64_t engine_now_us() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

// ---------------------------------------------------------------------------
// ReorderBuffer
// ---------------------------------------------------------------------------

void ReorderBuffer::push(const TimedPacket& pkt) {
    if (started_ && pkt.pkt.seq < next_seq_) {
        ++late_dropped_;
        return;
    }
    if (!started_) {
        started_ = true;
        next_seq_ = pkt.pkt.seq;
    }
    if (!pending_.emplace(pkt.pkt.seq, pkt).second) {
        ++duplicates_;
    }
}

std::vector<TimedPacket> ReorderBuffer::drain(std::uint64_t now_us) {
    std::vector<TimedPacket> out;
    while (!pending_.empty()) {
        auto first = pending_.begin();
        // In-seq order, and never ahead of the caller's clock: a packet that
        // has not arrived by now_us stays buffered for a later tick.
        if (first->second.recv_us > now_us) break;
        if (first->first == next_seq_) {
            out.push_back(first->second);
            pending_.erase(first);
            ++next_seq_;
            continue;
        }
        // Oldest deliverable packet is stuck behind a gap; skip the gap once
        // the reorder window has elapsed since it arrived.
        if (now_us - first->second.recv_us > window_us_) {
            missing_ += first->first - next_seq_;
            next_seq_ = first->first;
            continue;
        }
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// StreamAligner
// ---------------------------------------------------------------------------

StreamAligner::StreamAligner(double rate_hz, std::uint64_t reorder_window_us,
                             std::uint64_t starvation_us)
    : period_us_(static_cast<std::uint64_t>(1e6 / rate_hz)),
      starvation_us_(starvation_us),
      wrist_(reorder_window_us),
      pocket_(reorder_window_us) {}

void StreamAligner::push(const TimedPacket& pkt) {
    if (pkt.pkt.device_id == kDeviceWrist) {
        wrist_.push(pkt);
    } else {
        pocket_.push(pkt);
    }
}

std::vector<AlignedFrame> StreamAligner::poll(std::uint64_t now_us) {
    std::vector<AlignedFrame> frames;
    // Process tick by tick so zero-order-hold state matches each tick time.
    while (true) {
        const std::uint64_t tick = ticking_ ? next_tick_us_ : now_us;
        if (tick > now_us) break;
        for (const TimedPacket& p : wrist_.drain(tick)) {
            last_wrist_ = p.pkt;
            last_wrist_recv_ = p.recv_us;
        }
        for (const TimedPacket& p : pocket_.drain(tick)) {
            last_pocket_ = p.pkt;
            last_pocket_recv_ = p.recv_us;
        }
        if (!ticking_) {
            if (!last_wrist_ || !last_pocket_) break;  // wait for both devices
            ticking_ = true;
            next_tick_us_ = tick;
        }
        AlignedFrame frame;
        frame.wrist = *last_wrist_;
        frame.pocket = *last_pocket_;
        frame.tick_us = next_tick_us_;
        frame.wrist_degraded = next_tick_us_ - last_wrist_recv_ > starvation_us_;
        frame.pocket_degraded = next_tick_us_ - last_pocket_recv_ > starvation_us_;
        frames.push_back(frame);
        next_tick_us_ += period_us_;
    }
    return frames;
}

// ---------------------------------------------------------------------------
// Socket sources
// ---------------------------------------------------------------------------

namespace {

int bind_socket(int type, const std::string& bind_addr, std::uint16_t port,
                std::uint16_t* bound_port) {
    const int fd = ::socket(AF_INET, type, 0);
    if (fd < 0) throw IoError("socket() failed: " + std::string(std::strerror(errno)));
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (bind_addr.empty() || bind_addr == "0.0.0.0") {
        addr.sin_addr.s_addr = INADDR_ANY;
    } else if (::inet_pton(AF_INET, bind_addr.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw ConfigError("bad bind address: " + bind_addr);
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw IoError("bind() failed on port " + std::to_string(port) + ": " +
                      std::strerror(errno));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    if (bound_port) *bound_port = ntohs(addr.sin_port);
    return fd;
}

bool wait_readable(int fd, int timeout_ms) {
    pollfd pfd{fd, POLLIN, 0};
    return ::poll(&pfd, 1, timeout_ms) > 0 && (pfd.revents & POLLIN) != 0;
}

}  // namespace

UdpSource::UdpSource(const std::string& bind_addr, std::uint16_t port) {
    fd_ = bind_socket(SOCK_DGRAM, bind_addr, port, &port_);
}

UdpSource::~UdpSource() {
    stop();
    if (fd_ >= 0) ::close(fd_);
}

void UdpSource::start(PacketCallback on_packet) {
    running_ = true;
    worker_ = std::thread([this, on_packet = std::move(on_packet)] {
        std::array<std::uint8_t, 2048> buf;
        while (running_) {
            if (!wait_readable(fd_, 50)) continue;
            const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
            if (n < static_cast<ssize_t>(kPacketSize)) continue;
            if (auto pkt = try_decode_packet(std::span(buf.data(), kPacketSize))) {
                on_packet(TimedPacket{*pkt, engine_now_us()});
            }
        }
    });
}

void UdpSource::stop() {
    running_ = false;
    if (worker_.joinable()) worker_.join();
}

TcpSource::TcpSource(const std::string& bind_addr, std::uint16_t port) {
    listen_fd_ = bind_socket(SOCK_STREAM, bind_addr, port, &port_);
    if (::listen(listen_fd_, 1) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw IoError("listen() failed: " + std::string(std::strerror(errno)));
    }
}

TcpSource::~TcpSource() {
    stop();
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpSource::start(PacketCallback on_packet) {
    running_ = true;
    worker_ = std::thread([this, on_packet = std::move(on_packet)] {
        while (running_) {
            if (!wait_readable(listen_fd_, 50)) continue;
            const int conn = ::accept(listen_fd_, nullptr, nullptr);
            if (conn < 0) continue;
            PacketFramer framer;
            std::array<std::uint8_t, 4096> buf;
            while (running_) {
                if (!wait_readable(conn, 50)) continue;
                const ssize_t n = ::recv(conn, buf.data(), buf.size(), 0);
                if (n <= 0) break;
                framer.feed(std::span(buf.data(), static_cast<size_t>(n)));
                while (auto pkt = framer.next()) {
                    on_packet(TimedPacket{*pkt, engine_now_us()});
                }
            }
            ::close(conn);
        }
    });
}

void TcpSource::stop() {
    running_ = false;
    if (worker_.joinable()) worker_.join();
}

}  // namespace baromocap
