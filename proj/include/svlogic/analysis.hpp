#pragma once

#include "svlogic/devices.hpp"
#include "svlogic/transient.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace svl::analysis {

struct WallLocation {
  std::optional<double> position;  // m
  int count = 0;                   // number of m_x sign changes
  bool multiple() const { return count > 1; }
};

/// Linear-interpolated zero crossing of m_x along the wire. With several walls
/// the one furthest along +x (closest to the wire's output end) is returned.
WallLocation dw_position(const mag::WireState& wire);

/// First time the wire's <m_x> reaches the opposite sign at |<m_x>| >= threshold
/// and stays there to the end of the trace.
std::optional<double> switching_delay(const transient::Trace& trace, int wire, double threshold = 0.9);

/// First time the contact-region <m_x> has the opposite sign to its initial value.
std::optional<double> wall_created_at(const transient::Trace& trace, int contact);

enum class WiringKind { Averaged, Series, Fixed };

/// Wiring resistance to the supply. Per contact it scales as r_ref * l_ref / L.
struct WiringModel {
  WiringKind kind = WiringKind::Averaged;
  double r_ref = 300.0;
  double l_ref = 10e-9;
  double fixed = 300.0;

  double effective_resistance(double l_input, double l_output) const;
};

/// E = I^2 R tau.
double switching_energy(double current, double pulse, double l_input, double l_output,
                        const WiringModel& model = {});

/// Multi-terminal generalisation: each terminal t carries I_t through its own
/// wiring r_ref * l_ref / L_t. Averaged: E = tau/2 * sum I_t^2 R_t; Series: the
/// plain sum; Fixed: tau * R * sum I_t^2 / 2. Reduces to switching_energy() for
/// two terminals carrying the same current.
struct Terminal {
  double current = 0.0;
  double contact_length = 0.0;
};
double switching_energy(const std::vector<Terminal>& terminals, double pulse, const WiringModel& model = {});

struct SwitchReport {
  bool switched = false;
  double delay = 0.0;           // s, valid when switched
  double dw_created_at = 0.0;   // s, valid when a wall was created
  bool dw_created = false;
  double dw_arrival_at = 0.0;   // s, equals delay
  double energy = 0.0;          // J, wiring dissipation
  double device_energy = 0.0;   // J, I^2 R of the device itself over the pulse
  int final_state = 0;
  int expected_state = 0;
};

/// Builds the report for the device's output wire. `pulse` is the drive time
/// charged to the energy (the early-cutoff time when it applies).
SwitchReport make_report(const device::Device& device, const transient::Trace& trace, double threshold = 0.9,
                         const WiringModel& model = {});

/// Expected output bit. device kind sv/nlsv take one input, majority3 takes three.
int truth_table(device::DeviceKind kind, int drive_sign, const std::vector<int>& inputs);

/// Boolean majority AB + BC + CA.
inline int majority(int a, int b, int c) { return (a & b) | (b & c) | (c & a); }

void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const SwitchReport& r);

}  // namespace svl::analysis
