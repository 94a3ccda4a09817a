#pragma once

#include <string>

#include "baromocap/neural.hpp"

namespace baromocap {

/// Versioned binary weight container: little-endian 32-bit floats plus the
/// feature flattening-order tag, so weights and feature layout stay in sync.
/// Parameters are stored in double precision in memory and rounded to f32 on
/// disk.
void save_pose_net(const PoseNet& net, const std::string& path);
PoseNet load_pose_net(const std::string& path);

void save_velocity_net(const VelocityNet& net, const std::string& path);
VelocityNet load_velocity_net(const std::string& path);

}  // namespace baromocap
