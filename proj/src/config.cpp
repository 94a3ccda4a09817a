#include "baromocap/config.hpp"

#include <fstream>
#include <sstream>

#include "baromocap/errors.hpp"

namespace baromocap {

SessionConfig SessionConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    SessionConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        std::string value;
        std::getline(ss, value);
        const auto at = value.find_first_not_of(" \t");
        value = (at == std::string::npos) ? "" : value.substr(at);

        if (key == "listen") cfg.listen = value;
        else if (key == "calibration") cfg.calib_path = value;
        else if (key == "pose_checkpoint") cfg.pose_checkpoint = value;
        else if (key == "velocity_checkpoint") cfg.velocity_checkpoint = value;
        else if (key == "skeleton") cfg.skeleton_path = value;
        else if (key == "output") cfg.output_path = value;
        else if (key == "output_format") cfg.output_format = value;
        else if (key == "rate_hz") cfg.rate_hz = std::stod(value);
        else if (key == "subtract_gravity") cfg.subtract_gravity = (value == "true" || value == "1");
        else if (key == "filter.q_accel") cfg.filter.q_accel = std::stod(value);
        else if (key == "filter.r_meas") cfg.filter.r_meas = std::stod(value);
        else {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key " + key);
        }
    }
    if (cfg.rate_hz <= 0.0) throw ConfigError("rate_hz must be positive");
    if (cfg.output_format != "text" && cfg.output_format != "binary") {
        throw ConfigError("output_format must be text or binary");
    }
    return cfg;
}

void SessionConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file " + path);
    out.precision(17);
    out << "listen " << listen << "\n";
    if (!calib_path.empty()) out << "calibration " << calib_path << "\n";
    if (!pose_checkpoint.empty()) out << "pose_checkpoint " << pose_checkpoint << "\n";
    if (!velocity_checkpoint.empty()) out << "velocity_checkpoint " << velocity_checkpoint << "\n";
    if (!skeleton_path.empty()) out << "skeleton " << skeleton_path << "\n";
    if (!output_path.empty()) out << "output " << output_path << "\n";
    out << "output_format " << output_format << "\n";
    out << "rate_hz " << rate_hz << "\n";
    out << "subtract_gravity " << (subtract_gravity ? "true" : "false") << "\n";
    out << "filter.q_accel " << filter.q_accel << "\n";
    out << "filter.r_meas " << filter.r_meas << "\n";
}

Endpoint parse_endpoint(const std::string& text) {
    Endpoint ep;
    std::string rest;
    if (text.rfind("udp://", 0) == 0) {
        ep.udp = true;
        rest = text.substr(6);
    } else if (text.rfind("tcp://", 0) == 0) {
        ep.udp = false;
        rest = text.substr(6);
    } else {
        throw ConfigError("endpoint must start with udp:// or tcp://, got " + text);
    }
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ConfigError("endpoint missing port: " + text);
    ep.host = rest.substr(0, colon);
    const int port = std::stoi(rest.substr(colon + 1));
    if (port <= 0 || port > 65535) throw ConfigError("endpoint port out of range: " + text);
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

}  // namespace baromocap
