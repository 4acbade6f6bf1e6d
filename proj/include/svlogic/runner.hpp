#pragma once

// File-producing front end shared by the CLI and the tests: one transient into
// a directory, or a whole preset sweep with a manifest.

#include "svlogic/analysis.hpp"
#include "svlogic/devices.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace svl::runner {

namespace fs = std::filesystem;

/// Writes to a temporary sibling and renames over `path`.
void write_file_atomic(const fs::path& path, const std::string& content);

struct RunResult {
  analysis::SwitchReport report;
  std::vector<int> final_inputs;
  std::vector<std::string> files;  // relative to the run directory
};

/// Builds the device, runs the transient with `seed` and writes trace.csv,
/// report.csv, config.ini, summary.txt and wire_<name>.csv (final state).
RunResult run_to_directory(const device::DeviceConfig& cfg, std::uint64_t seed, const fs::path& dir);

std::string summary_text(const device::Device& dev, const analysis::SwitchReport& r, std::uint64_t seed);

struct SweepOptions {
  std::string preset;
  fs::path out;
  int jobs = 1;
  int seeds = 1;
  std::uint64_t master_seed = 1;
  /// Config every preset point starts from.
  device::DeviceConfig base;
  bool quiet = false;
};

struct SweepResult {
  int runs = 0;
  int failures = 0;
};

/// Runs every (point, seed) pair on a pool of `jobs` threads, then writes
/// manifest.json and report.csv at the top of `out`. Output bytes depend only
/// on the options, not on `jobs` or scheduling.
SweepResult run_sweep(const SweepOptions& opt);

}  // namespace svl::runner
