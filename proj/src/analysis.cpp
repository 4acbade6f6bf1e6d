#include "svlogic/analysis.hpp"

#include "svlogic/errors.hpp"

#include <cmath>
#include <ostream>

namespace svl::analysis {

WallLocation dw_position(const mag::WireState& wire) {
  WallLocation loc;
  for (int i = 0; i + 1 < wire.n_cells(); ++i) {
    const double a = wire.m[i].x();
    const double b = wire.m[i + 1].x();
    if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
      if (b == 0.0 && i + 2 < wire.n_cells() && (wire.m[i + 2].x() < 0.0) == (a < 0.0)) continue;
      ++loc.count;
      const double f = a / (a - b);
      loc.position = wire.x(i) + f * wire.mesh;
    }
  }
  return loc;
}

std::optional<double> switching_delay(const transient::Trace& trace, int wire, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("switching threshold must lie in (0, 1)");
  const auto& mx = trace.wires.at(wire).mx;
  if (mx.empty()) return std::nullopt;
  const double target = mx.front() >= 0.0 ? -1.0 : 1.0;
  // Walk back from the end while the wire stays switched.
  std::size_t k = mx.size();
  while (k > 0 && mx[k - 1] * target >= threshold) --k;
  if (k == mx.size()) return std::nullopt;
  if (k == 0) return trace.time.front();
  // Interpolate the crossing between samples k-1 and k.
  const double a = mx[k - 1] * target - threshold;
  const double b = mx[k] * target - threshold;
  const double f = (a == b) ? 1.0 : a / (a - b);
  return trace.time[k - 1] + f * (trace.time[k] - trace.time[k - 1]);
}

std::optional<double> wall_created_at(const transient::Trace& trace, int contact) {
  const auto& mx = trace.contact_mx.at(contact);
  if (mx.empty()) return std::nullopt;
  const double sign = mx.front() >= 0.0 ? 1.0 : -1.0;
  for (std::size_t k = 1; k < mx.size(); ++k) {
    if (mx[k] * sign < 0.0) {
      const double a = mx[k - 1], b = mx[k];
      const double f = a / (a - b);
      return trace.time[k - 1] + f * (trace.time[k] - trace.time[k - 1]);
    }
  }
  return std::nullopt;
}

double WiringModel::effective_resistance(double l_input, double l_output) const {
  switch (kind) {
    case WiringKind::Fixed: return fixed;
    case WiringKind::Averaged: return 0.5 * r_ref * (l_ref / l_input + l_ref / l_output);
    case WiringKind::Series: return r_ref * (l_ref / l_input + l_ref / l_output);
  }
  return fixed;
}

double switching_energy(double current, double pulse, double l_input, double l_output, const WiringModel& model) {
  if (!(pulse >= 0.0)) throw ConfigError("pulse must be non-negative");
  if (model.kind != WiringKind::Fixed && !(l_input > 0.0 && l_output > 0.0)) {
    throw ConfigError("contact lengths must be positive");
  }
  return current * current * model.effective_resistance(l_input, l_output) * pulse;
}

double switching_energy(const std::vector<Terminal>& terminals, double pulse, const WiringModel& model) {
  double sum = 0.0;
  for (const auto& t : terminals) {
    const double r = model.kind == WiringKind::Fixed ? model.fixed : model.r_ref * model.l_ref / t.contact_length;
    sum += t.current * t.current * r;
  }
  const double share = model.kind == WiringKind::Series ? 1.0 : 0.5;
  return share * sum * pulse;
}

SwitchReport make_report(const device::Device& dev, const transient::Trace& trace, double threshold,
                         const WiringModel& model) {
  SwitchReport r;
  const auto delay = switching_delay(trace, dev.output_wire, threshold);
  r.switched = delay.has_value();
  if (delay) r.delay = r.dw_arrival_at = *delay;
  if (const auto created = wall_created_at(trace, dev.output_contact)) {
    r.dw_created = true;
    r.dw_created_at = *created;
  }
  r.final_state = dev.bit(dev.output_wire);

  std::vector<int> inputs;
  for (int c : dev.input_contacts) {
    const int w = dev.contacts[c].wire;
    inputs.push_back(trace.wires[w].mx.front() > 0.0 ? 1 : 0);
  }
  const double drive = dev.config.drive.current;
  r.expected_state = drive == 0.0 ? (trace.wires[dev.output_wire].mx.front() > 0.0 ? 1 : 0)
                                  : truth_table(dev.kind, drive > 0.0 ? 1 : -1, inputs);

  const double tau = trace.cutoff_at ? std::min(*trace.cutoff_at, dev.config.drive.pulse) : dev.config.drive.pulse;
  std::vector<Terminal> terminals;
  double total_in = 0.0;
  for (int c : dev.input_contacts) {
    const auto& con = dev.contacts[c];
    terminals.push_back({drive * con.weight, con.length});
    total_in += drive * con.weight;
  }
  // The output terminal (or the NLSV ground arm) returns the injected current.
  const auto& out = dev.contacts[dev.output_contact];
  terminals.push_back({total_in, dev.kind == device::DeviceKind::Nlsv ? dev.config.contacts.L_output : out.length});
  r.energy = switching_energy(terminals, tau, model);

  // Device dissipation at the final magnetic state: P = sum I_src * V_charge.
  if (drive != 0.0) {
    device::Device probe = dev;
    probe.set_drive(drive);
    probe.refresh_conductances();
    const auto sol = circuit::solve(probe.graph);
    double p = 0.0;
    for (const auto& s : probe.graph.sources()) p += s.amplitude * sol.node_voltages[s.node](0);
    r.device_energy = p * tau;
  }
  return r;
}

int truth_table(device::DeviceKind kind, int drive_sign, const std::vector<int>& inputs) {
  return device::drive_polarity_semantics(kind, drive_sign, inputs);
}

void write_report_csv_header(std::ostream& out) {
  out << "switched,delay_s,dw_created_at_s,dw_arrival_at_s,energy_J,device_energy_J,final_state,expected_state\n";
}

void write_report_csv_row(std::ostream& out, const SwitchReport& r) {
  auto opt = [&out](bool ok, double v) {
    if (ok) {
      out << v;
    } else {
      out << "nan";
    }
  };
  out.precision(10);
  out << (r.switched ? 1 : 0) << ',';
  opt(r.switched, r.delay);
  out << ',';
  opt(r.dw_created, r.dw_created_at);
  out << ',';
  opt(r.switched, r.dw_arrival_at);
  out << ',' << r.energy << ',' << r.device_energy << ',' << r.final_state << ',' << r.expected_state << '\n';
}

}  // namespace svl::analysis
