#pragma once

// Device templates: lateral spin valve (buffer/inverter), three-input majority
// gate and the non-local spin valve baseline. A builder turns a DeviceConfig
// into a circuit graph whose magnetic branches point at wire cells.

#include "svlogic/magnetodynamics.hpp"
#include "svlogic/spincircuit.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace svl::device {

enum class DeviceKind { SpinValve, Majority3, Nlsv };
enum class DemagMode { Strip, Prism };
enum class TorqueMode { PerCell, ContactAveraged };

std::string to_string(DeviceKind kind);
DeviceKind device_kind_from_string(const std::string& s);

struct FmConfig {
  double rho = 1.4e-7;        // Ohm·m
  double beta = 0.6;
  double l_sf_par = 5e-9;     // m
  double l_sf_perp = 0.8e-9;  // m
  double M_s = 8e5;           // A/m
  double A = 1.3e-11;         // J/m
  double alpha = 0.007;
  double K_u = 0.0;           // J/m^3
  double l_FM = 300e-9;
  double w_FM = 20e-9;
  double t_FM = 2e-9;
  double gamma = 1.76085963023e11;
  DemagMode demag = DemagMode::Strip;
};

struct ChannelConfig {
  double l_NM = 70e-9;  // inter-contact span
  double w_NM = 20e-9;
  double t_NM = 20e-9;
  double rho_N = 3e-8;
  double lambda_N = 100e-9;
  double gap_mesh = 10e-9;          // node pitch between contacts
  double junction_fraction = 0.5;   // majority: input-arm share of l_NM
  double shunt_length = 30e-9;      // NLSV ground arm
};

struct ContactConfig {
  double L_input = 40e-9;
  double L_output = 20e-9;
  double alpha_end = 0.18;
  double damping_length = 0.0;         // input wire end region; 0: damping_scale * L_input
  double damping_scale = 1.0;          // rounded up to whole cells, capped at the wire
  bool damp_output_end = true;         // the far end of the output wire feeds the next stage
  double output_damping_length = 0.0;  // 0: same as the input region
};

struct DriveConfig {
  double current = 200e-6;  // A, positive into the input terminal(s)
  double pulse = 1.5e-9;    // s
  bool early_cutoff = false;
  /// Multiplier on the current actually driven through the circuit. Reported
  /// energies use `current`; see README for why presets set this.
  double current_scale = 1.0;
};

struct SimConfig {
  double temperature = 0.0;
  double dt = 2e-14;
  double duration = 3e-9;
  double mesh = 2e-9;
  int refresh_stride = 1;
  int sample_stride = 10;
  std::uint64_t seed = 1;
  double init_tilt = 0.02;  // rad, in-plane cant of the output wire
  TorqueMode torque_mode = TorqueMode::PerCell;
};

struct StateConfig {
  std::vector<int> inputs{1};  // one bit per input wire
  int output = 1;
};

struct DeviceConfig {
  DeviceKind kind = DeviceKind::SpinValve;
  FmConfig fm;
  ChannelConfig channel;
  circuit::InterfaceParams interface;
  ContactConfig contacts;
  DriveConfig drive;
  SimConfig sim;
  StateConfig state;

  mag::MaterialFM material() const;
  /// Throws ConfigError on inconsistent geometry (mesh mismatch, contact longer
  /// than the wire, ...) and StabilityError when dt is too coarse for the
  /// exchange stiffness at this mesh.
  void validate() const;
};

/// One FM wire region contacted to the channel through per-cell sub-circuits.
struct Contact {
  std::string name;
  int wire = 0;
  mag::CellRange cells;
  std::vector<int> channel_nodes;
  std::vector<int> interface_nodes;
  std::vector<int> fm_nodes;
  std::vector<int> torque_branches;  // NM-side transverse interface shunts
  std::vector<int> sources;          // current sources at the FM nodes
  double weight = 0.0;               // share of the drive current injected here
  double length = 0.0;               // m
};

struct Device {
  DeviceKind kind = DeviceKind::SpinValve;
  DeviceConfig config;
  circuit::CircuitGraph graph;
  mag::MaterialFM material;
  std::vector<mag::WireState> wires;
  std::vector<std::string> wire_names;
  std::vector<Contact> contacts;
  std::vector<int> input_contacts;
  int output_contact = 0;
  int output_wire = 0;
  int channel_nodes = 0;

  /// Scale every current source to `current` times its contact weight.
  void set_drive(double current);
  /// Rotate magnetic blocks to the present wire state.
  void refresh_conductances();
  int bit(int wire) const;
};

Device build_sv(const DeviceConfig& config);
Device build_majority3(const DeviceConfig& config);
Device build_nlsv(const DeviceConfig& config);
/// Dispatch on config.kind.
Device build(const DeviceConfig& config);

/// Final output bit the device is meant to reach: a negative drive copies
/// (parallel, buffer), a positive drive inverts (anti-parallel, inverter). For
/// the majority gate the copied value is the majority of the inputs.
int drive_polarity_semantics(DeviceKind kind, int drive_sign, const std::vector<int>& inputs);

/// Largest Heun step that keeps the stiffest exchange mode damped:
/// (omega_ex dt)^3 < 8 alpha with omega_ex = 8 gamma A / (Ms mesh^2).
double max_stable_dt(const FmConfig& fm, double mesh);

}  // namespace svl::device
