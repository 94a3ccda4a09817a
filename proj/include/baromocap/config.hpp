#pragma once

#include <string>

#include "baromocap/baro_fusion.hpp"

namespace baromocap {

/// Engine session configuration (key-value text file, one "key value" pair
/// per line, '#' comments).
struct SessionConfig {
    std::string listen = "udp://0.0.0.0:9101";  // udp://host:port or tcp://host:port
    std::string calib_path;
    std::string pose_checkpoint;
    std::string velocity_checkpoint;
    std::string skeleton_path;  // empty = built-in mean shape
    std::string output_path;    // empty = stdout
    std::string output_format = "text";  // text | binary
    double rate_hz = 30.0;
    bool subtract_gravity = false;  // live hardware reports specific force
    KalmanParams filter;

    static SessionConfig load(const std::string& path);
    void save(const std::string& path) const;
};

struct Endpoint {
    bool udp = true;
    std::string host = "0.0.0.0";
    std::uint16_t port = 0;
};

/// Parses "udp://host:port" / "tcp://host:port"; throws ConfigError.
Endpoint parse_endpoint(const std::string& text);

}  // namespace baromocap
