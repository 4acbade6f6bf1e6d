#include "svlogic/transient.hpp"

#include "svlogic/analysis.hpp"
#include "svlogic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace svl::transient {

double pulse_waveform(double t, double amplitude, double duration) {
  if (!(duration > 0.0)) throw ConfigError("pulse duration must be positive");
  return (t >= 0.0 && t < duration) ? amplitude : 0.0;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

TransientOptions TransientOptions::from(const device::DeviceConfig& cfg) {
  TransientOptions o;
  o.duration = cfg.sim.duration;
  o.dt = cfg.sim.dt;
  o.refresh_stride = cfg.sim.refresh_stride;
  o.sample_stride = cfg.sim.sample_stride;
  o.drive_current = cfg.drive.current * cfg.drive.current_scale;
  o.pulse = cfg.drive.pulse;
  o.early_cutoff = cfg.drive.early_cutoff;
  o.torque_mode = cfg.sim.torque_mode;
  return o;
}

namespace {

class Recorder {
 public:
  Recorder(const device::Device& dev, Trace& trace) : dev_(dev), trace_(trace) {
    trace_.wires.resize(dev.wires.size());
    trace_.wire_names = dev.wire_names;
    trace_.contact_mx.resize(dev.contacts.size());
    trace_.contact_spin_current.resize(dev.contacts.size());
  }

  void sample(double t, double drive, const std::vector<Vec3>& contact_is) {
    trace_.time.push_back(t);
    for (std::size_t w = 0; w < dev_.wires.size(); ++w) {
      const auto& ws = dev_.wires[w];
      const Vec3 avg = ws.average();
      auto& s = trace_.wires[w];
      s.mx.push_back(avg.x());
      s.my.push_back(avg.y());
      s.mz.push_back(avg.z());
      s.dw_position.push_back(analysis::dw_position(ws).position);
      s.energy.push_back(mag::micromagnetic_energy(ws, dev_.material));
    }
    for (std::size_t c = 0; c < dev_.contacts.size(); ++c) {
      const auto& con = dev_.contacts[c];
      trace_.contact_mx[c].push_back(dev_.wires[con.wire].average(con.cells).x());
      trace_.contact_spin_current[c].push_back(contact_is[c]);
    }
    trace_.drive.push_back(drive);
  }

 private:
  const device::Device& dev_;
  Trace& trace_;
};

}  // namespace

Trace run_transient(device::Device& dev, const TransientOptions& opt, std::uint64_t seed) {
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be positive");
  if (opt.refresh_stride < 1 || opt.sample_stride < 1) throw ConfigError("strides must be at least 1");
  const double ratio = opt.duration / opt.dt;
  if (!(ratio >= 1.0) || ratio > 1e7) throw ConfigError("duration/dt must lie in [1, 1e7] steps");
  const long steps = std::lround(ratio);

  const std::size_t n_wires = dev.wires.size();
  const std::size_t n_contacts = dev.contacts.size();
  std::vector<mag::Rng> rngs;
  for (std::size_t w = 0; w < n_wires; ++w) rngs.emplace_back(splitmix64(seed + 0x9E3779B97F4A7C15ull * (w + 1)));
  std::vector<mag::LlgIntegrator> integrators(n_wires);

  std::vector<mag::TorqueField> torque(n_wires);
  std::vector<Vec3> contact_is(n_contacts, Vec3::Zero());
  // Electron-spin-convention currents per contact cell, held between refreshes.
  std::vector<std::vector<Vec3>> cell_is(n_contacts);
  bool have_currents = false;

  const auto& out_con = dev.contacts[dev.output_contact];
  const double initial_out_sign = dev.wires[out_con.wire].average(out_con.cells).x() >= 0.0 ? 1.0 : -1.0;

  Trace trace;
  Recorder rec(dev, trace);
  bool cut = false;
  double last_drive = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> snapshot_times = opt.snapshot_times;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  std::size_t next_snapshot = 0;

  for (long step = 0; step <= steps; ++step) {
    const double t = step * opt.dt;

    if (opt.early_cutoff && !cut) {
      const double s = dev.wires[out_con.wire].average(out_con.cells).x();
      if (s * initial_out_sign < 0.0) {
        cut = true;
        trace.cutoff_at = t;
      }
    }
    const double drive = cut ? 0.0 : pulse_waveform(t, opt.drive_current, opt.pulse);

    if (drive == 0.0) {
      have_currents = false;
    } else if (!have_currents || step % opt.refresh_stride == 0 || drive != last_drive) {
      dev.set_drive(drive);
      dev.refresh_conductances();
      circuit::SolveResult sol;
      try {
        sol = circuit::solve(dev.graph, opt.solver);
      } catch (const SingularCircuit& e) {
        throw PhysicsAbort(e.what(), step);
      }
      for (std::size_t c = 0; c < n_contacts; ++c) {
        const auto& con = dev.contacts[c];
        const auto& ws = dev.wires[con.wire];
        std::vector<Vec3> m(ws.m.begin() + con.cells.begin, ws.m.begin() + con.cells.end);
        cell_is[c] = circuit::stt_at_contact(sol, con.torque_branches, m);
      }
      have_currents = true;
    }
    last_drive = drive;

    for (std::size_t c = 0; c < n_contacts; ++c) {
      contact_is[c].setZero();
      if (have_currents) {
        for (const auto& v : cell_is[c]) contact_is[c] += v;
      }
    }
    trace.drive_charge_squared += drive * drive * opt.dt;

    if (step % opt.sample_stride == 0 || step == steps) rec.sample(t, drive, contact_is);
    while (next_snapshot < snapshot_times.size() && snapshot_times[next_snapshot] <= t + 0.5 * opt.dt) {
      trace.snapshots.push_back({t, dev.wires});
      ++next_snapshot;
    }
    if (step == steps) break;

    for (std::size_t w = 0; w < n_wires; ++w) torque[w].spin_current.clear();
    if (have_currents) {
      for (std::size_t c = 0; c < n_contacts; ++c) {
        const auto& con = dev.contacts[c];
        auto& tf = torque[con.wire].spin_current;
        if (tf.empty()) tf.assign(dev.wires[con.wire].n_cells(), Vec3::Zero());
        const int n = con.cells.end - con.cells.begin;
        if (opt.torque_mode == device::TorqueMode::ContactAveraged) {
          const Vec3 avg = contact_is[c] / n;
          for (int k = 0; k < n; ++k) tf[con.cells.begin + k] = avg;
        } else {
          for (int k = 0; k < n; ++k) tf[con.cells.begin + k] = cell_is[c][k];
        }
      }
    }

    for (std::size_t w = 0; w < n_wires; ++w) {
      auto& ws = dev.wires[w];
      integrators[w].step(ws, dev.material, &torque[w], opt.dt, rngs[w]);
      for (const auto& m : ws.m) {
        if (!m.allFinite()) throw PhysicsAbort("non-finite magnetization in wire " + dev.wire_names[w], step);
      }
    }
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t_s";
  for (std::size_t w = 0; w < trace.wires.size(); ++w) {
    out << ",w" << w << "_mx,w" << w << "_my,w" << w << "_mz,w" << w << "_dw_pos_m";
  }
  for (std::size_t c = 0; c < trace.contact_spin_current.size(); ++c) {
    out << ",c" << c << "_isx_A,c" << c << "_isy_A,c" << c << "_isz_A";
  }
  out << ",drive_A\n";
  out.precision(10);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << trace.time[k];
    for (const auto& s : trace.wires) {
      out << ',' << s.mx[k] << ',' << s.my[k] << ',' << s.mz[k] << ',';
      if (s.dw_position[k]) {
        out << *s.dw_position[k];
      } else {
        out << "nan";
      }
    }
    for (const auto& c : trace.contact_spin_current) out << ',' << c[k].x() << ',' << c[k].y() << ',' << c[k].z();
    out << ',' << trace.drive[k] << '\n';
  }
}

}  // namespace svl::transient
