#pragma once

// Self-consistent time loop: solve the spin circuit, hand the absorbed spin
// currents to the LLG integrator, advance every wire, repeat.

#include "svlogic/devices.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace svl::transient {

using mag::Vec3;

/// Rectangular pulse: `amplitude` for 0 <= t < duration, zero afterwards.
double pulse_waveform(double t, double amplitude, double duration);

struct TransientOptions {
  double duration = 3e-9;
  double dt = 2e-14;
  int refresh_stride = 1;
  int sample_stride = 10;
  double drive_current = 200e-6;
  double pulse = 1.5e-9;
  /// Zero the drive once the output contact region has reversed.
  bool early_cutoff = false;
  device::TorqueMode torque_mode = device::TorqueMode::PerCell;
  circuit::SolveMethod solver = circuit::SolveMethod::LeafCondensed;
  /// Times at which full wire states are copied into Trace::snapshots.
  std::vector<double> snapshot_times;

  static TransientOptions from(const device::DeviceConfig& cfg);
};

struct WireSeries {
  std::vector<double> mx, my, mz;
  std::vector<std::optional<double>> dw_position;
  std::vector<double> energy;  // J
};

struct Snapshot {
  double time = 0.0;
  std::vector<mag::WireState> wires;
};

struct Trace {
  std::vector<double> time;
  std::vector<WireSeries> wires;
  std::vector<std::string> wire_names;
  /// Contact-region average m_x, one series per contact.
  std::vector<std::vector<double>> contact_mx;
  /// Spin current absorbed by each contact (sum over its cells), A.
  std::vector<std::vector<Vec3>> contact_spin_current;
  std::vector<double> drive;
  /// Time the drive was cut early, if it was.
  std::optional<double> cutoff_at;
  std::vector<Snapshot> snapshots;
  /// Integral of drive^2 dt, A^2·s.
  double drive_charge_squared = 0.0;

  std::size_t size() const { return time.size(); }
};

/// Runs `opt.duration` of dynamics. Wire RNG streams derive from `seed`, so the
/// result is a pure function of (device, options, seed).
Trace run_transient(device::Device& device, const TransientOptions& opt, std::uint64_t seed);

/// Header: t_s, per wire w{i}_mx, w{i}_my, w{i}_mz, w{i}_dw_pos_m, per contact
/// c{j}_isx_A, c{j}_isy_A, c{j}_isz_A, then drive_A. Empty wall position is "nan".
void write_trace_csv(std::ostream& out, const Trace& trace);

/// Stateless 64-bit mixer used for every derived seed.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace svl::transient
