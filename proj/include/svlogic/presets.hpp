#pragma once

// Named parameter sweeps. Each preset is a base set of overrides plus a list of
// points; a sweep runs every point once per seed.

#include "svlogic/devices.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace svl::presets {

struct Assignment {
  std::string key;  // "section.key"
  std::string value;
};

struct Point {
  std::string label;
  std::vector<Assignment> set;
};

struct Preset {
  std::string name;
  std::string anchor;  // figure or table the sweep reproduces
  std::string description;
  std::vector<Assignment> base;
  std::vector<Point> points;
};

/// Drive multiplier that puts the switching threshold between 100 and 140 uA
/// nominal. See README, "Drive calibration".
inline constexpr double kCalibratedCurrentScale = 28.0;
/// Input end region as a multiple of L_input, and the output far-end region.
inline constexpr double kCalibratedDampingScale = 2.5;
inline constexpr double kCalibratedOutputDamping = 40e-9;

/// Library defaults plus the calibrated drive and torque settings. Identical to
/// configs/default.ini.
device::DeviceConfig calibrated_config();

const std::vector<Preset>& all();
/// Throws ConfigError for an unknown name.
const Preset& find(const std::string& name);

/// base -> preset base overrides -> point overrides.
device::DeviceConfig point_config(const Preset& preset, const Point& point, const device::DeviceConfig& base);

/// FNV-1a, used to key per-run seeds by name.
std::uint64_t fnv1a64(const std::string& s);

/// Per-run seed: splitmix64(master ^ fnv1a64(key)). Keyed by name rather than
/// by position so adding points or seeds never changes existing runs.
std::uint64_t derive_seed(std::uint64_t master, const std::string& key);

}  // namespace svl::presets
