#include "svlogic/devices.hpp"

#include "svlogic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace svl::device {

using circuit::BranchKind;
using circuit::CellRef;
using circuit::Conductance4;
using mag::Vec3;

std::string to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::SpinValve: return "sv";
    case DeviceKind::Majority3: return "majority3";
    case DeviceKind::Nlsv: return "nlsv";
  }
  return "?";
}

DeviceKind device_kind_from_string(const std::string& s) {
  if (s == "sv") return DeviceKind::SpinValve;
  if (s == "majority3") return DeviceKind::Majority3;
  if (s == "nlsv") return DeviceKind::Nlsv;
  throw ConfigError("unknown device kind '" + s + "' (expected sv, majority3 or nlsv)");
}

namespace {

int cells_in(double length, double mesh, const char* what) {
  const double r = length / mesh;
  const long k = std::lround(r);
  if (k <= 0 || std::abs(r - static_cast<double>(k)) > 1e-6) {
    std::ostringstream os;
    os << what << " (" << length << " m) is not a positive multiple of the mesh (" << mesh << " m)";
    throw ConfigError(os.str());
  }
  return static_cast<int>(k);
}

}  // namespace

mag::MaterialFM DeviceConfig::material() const {
  mag::MaterialFM m;
  m.ms = fm.M_s;
  m.a_ex = fm.A;
  m.k_u = fm.K_u;
  m.gamma = fm.gamma;
  m.temperature = sim.temperature;
  m.demag = fm.demag == DemagMode::Strip ? mag::strip_demag(fm.w_FM, fm.t_FM)
                                         : mag::prism_demag(fm.l_FM, fm.w_FM, fm.t_FM);
  return m;
}

void DeviceConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(sim.mesh, "mesh");
  positive(sim.dt, "dt");
  positive(sim.duration, "duration");
  positive(fm.rho, "rho");
  positive(fm.l_sf_par, "l_sf_par");
  positive(fm.alpha, "alpha");
  positive(channel.rho_N, "rho_N");
  positive(channel.lambda_N, "lambda_N");
  positive(channel.l_NM, "l_NM");
  positive(channel.gap_mesh, "gap_mesh");
  positive(contacts.alpha_end, "alpha_end");
  positive(drive.pulse, "pulse");
  if (!(fm.beta >= 0.0 && fm.beta < 1.0)) throw UnphysicalPolarization("beta must lie in [0, 1)");
  if (sim.refresh_stride < 1 || sim.sample_stride < 1) throw ConfigError("strides must be at least 1");
  if (sim.temperature < 0.0) throw ConfigError("temperature must be non-negative");

  const int n = cells_in(fm.l_FM, sim.mesh, "l_FM");
  cells_in(fm.w_FM, sim.mesh, "w_FM");
  cells_in(fm.t_FM, sim.mesh, "t_FM");
  const int n_in = cells_in(contacts.L_input, sim.mesh, "L_input");
  const int n_out = cells_in(contacts.L_output, sim.mesh, "L_output");
  if (n_in > n || n_out > n) throw ConfigError("contact lengths must not exceed the wire length");
  if (!(contacts.damping_scale > 0.0 && std::isfinite(contacts.damping_scale))) {
    throw ConfigError("damping_scale must be positive");
  }
  if (contacts.damping_length > 0.0 && cells_in(contacts.damping_length, sim.mesh, "damping_length") > n) {
    throw ConfigError("damping_length exceeds the wire length");
  }
  if (contacts.output_damping_length > 0.0 &&
      cells_in(contacts.output_damping_length, sim.mesh, "output_damping_length") > n) {
    throw ConfigError("output_damping_length exceeds the wire length");
  }
  if (kind == DeviceKind::Majority3 && !(channel.junction_fraction > 0.0 && channel.junction_fraction < 1.0)) {
    throw ConfigError("junction_fraction must lie in (0, 1)");
  }
  if (kind == DeviceKind::Nlsv) positive(channel.shunt_length, "shunt_length");

  const std::size_t want = kind == DeviceKind::Majority3 ? 3 : 1;
  if (state.inputs.size() != want) {
    throw ConfigError("device " + to_string(kind) + " needs " + std::to_string(want) + " input bit(s)");
  }
  for (int b : state.inputs) {
    if (b != 0 && b != 1) throw ConfigError("input bits must be 0 or 1");
  }
  if (state.output != 0 && state.output != 1) throw ConfigError("output bit must be 0 or 1");
  material().validate();
  if (sim.dt > max_stable_dt(fm, sim.mesh)) {
    throw StabilityError("dt " + std::to_string(sim.dt) + " s exceeds the exchange stability limit " +
                         std::to_string(max_stable_dt(fm, sim.mesh)) + " s at this mesh");
  }
  if (!(drive.current_scale > 0.0) || !std::isfinite(drive.current_scale)) {
    throw ConfigError("current_scale must be positive");
  }
}

double max_stable_dt(const FmConfig& fm, double mesh) {
  const double omega = 8.0 * fm.gamma * fm.A / (fm.M_s * mesh * mesh);
  return std::cbrt(8.0 * fm.alpha) / omega;
}

void Device::set_drive(double current) {
  auto& sources = graph.sources();
  for (const auto& c : contacts) {
    if (c.sources.empty()) continue;
    const double per_cell = current * c.weight / static_cast<double>(c.sources.size());
    for (int s : c.sources) sources[s].amplitude = per_cell;
  }
}

void Device::refresh_conductances() {
  graph.refresh([this](const CellRef& r) -> const Vec3& { return wires[r.wire].m[r.cell]; });
}

int Device::bit(int wire) const { return wires.at(wire).average().x() > 0.0 ? 1 : 0; }

namespace {

class Builder {
 public:
  explicit Builder(const DeviceConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    dev_.kind = cfg.kind;
    dev_.config = cfg;
    dev_.material = cfg.material();
    mesh_ = cfg.sim.mesh;
    n_cells_ = cells_in(cfg.fm.l_FM, mesh_, "l_FM");
    n_in_ = cells_in(cfg.contacts.L_input, mesh_, "L_input");
    n_out_ = cells_in(cfg.contacts.L_output, mesh_, "L_output");
    if (cfg.contacts.damping_length > 0.0) {
      n_damp_ = cells_in(cfg.contacts.damping_length, mesh_, "damping_length");
    } else {
      // A scaled region rounds up to whole cells.
      const double cells = cfg.contacts.damping_scale * n_in_;
      n_damp_ = std::min(n_cells_, static_cast<int>(std::ceil(cells - 1e-9)));
    }
    n_damp_out_ = cfg.contacts.output_damping_length > 0.0
                      ? cells_in(cfg.contacts.output_damping_length, mesh_, "output_damping_length")
                      : n_damp_;

    const double cell_area = mesh_ * std::min(cfg.fm.w_FM, cfg.channel.w_NM);
    iface_ = circuit::interface_conductances(cell_area, cfg.interface);
    fm_ = circuit::fm_conductances(cfg.fm.t_FM, cell_area, cfg.fm.rho, cfg.fm.beta, cfg.fm.l_sf_par,
                                   cfg.fm.l_sf_perp);
  }

  int add_wire(const std::string& name, int bit, bool is_output) {
    auto w = mag::init_wire(n_cells_, mesh_, cfg_.fm.w_FM, cfg_.fm.t_FM, bit ? 1 : -1, cfg_.fm.alpha);
    if (!is_output) {
      mag::set_damping_profile(w, {n_cells_ - n_damp_, n_cells_}, cfg_.contacts.alpha_end);
    } else if (cfg_.contacts.damp_output_end) {
      mag::set_damping_profile(w, {n_cells_ - n_damp_out_, n_cells_}, cfg_.contacts.alpha_end);
    }
    if (is_output && cfg_.sim.init_tilt != 0.0) {
      const double t = cfg_.sim.init_tilt;
      for (auto& m : w.m) m = Vec3(m.x() * std::cos(t), std::sin(t), 0.0);
    }
    dev_.wires.push_back(std::move(w));
    dev_.wire_names.push_back(name);
    return static_cast<int>(dev_.wires.size()) - 1;
  }

  int channel_node(const std::string& label) {
    ++dev_.channel_nodes;
    return dev_.graph.add_node(label);
  }

  // NM segment between two channel nodes (j may be ground).
  void add_segment(int i, int j, double length) {
    const double area = cfg_.channel.w_NM * cfg_.channel.t_NM;
    const auto pi = circuit::nm_conductances(length, area, cfg_.channel.rho_N, cfg_.channel.lambda_N);
    dev_.graph.add_series(i, j, pi.series);
    dev_.graph.add_shunt(i, pi.shunt);
    if (j != circuit::kGround) dev_.graph.add_shunt(j, pi.shunt);
  }

  // Chain of channel nodes bridging `length` with pitch <= gap_mesh; returns
  // the far node, or connects to `to` when given.
  int add_span(int from, double length, const std::string& prefix, int to = -2) {
    const int k = std::max(1, static_cast<int>(std::ceil(length / cfg_.channel.gap_mesh - 1e-9)));
    const double seg = length / k;
    int prev = from;
    for (int s = 1; s < k; ++s) {
      const int nd = channel_node(prefix + std::to_string(s));
      add_segment(prev, nd, seg);
      prev = nd;
    }
    if (to == -2) {
      const int nd = channel_node(prefix + std::to_string(k));
      add_segment(prev, nd, seg);
      return nd;
    }
    add_segment(prev, to, seg);
    return to;
  }

  // Contact sub-circuits for `cells` of `wire`, channel nodes ordered like the cells.
  int add_contact(const std::string& name, int wire, mag::CellRange cells, double weight) {
    Contact c;
    c.name = name;
    c.wire = wire;
    c.cells = cells;
    c.weight = weight;
    c.length = (cells.end - cells.begin) * mesh_;
    auto& g = dev_.graph;
    const auto& ws = dev_.wires[wire];
    for (int cell = cells.begin; cell < cells.end; ++cell) {
      const std::string tag = name + "[" + std::to_string(cell) + "]";
      const int ch = channel_node("ch_" + tag);
      if (!c.channel_nodes.empty()) add_segment(c.channel_nodes.back(), ch, mesh_);
      const int in = g.add_node("if_" + tag);
      const int fm = g.add_node("fm_" + tag);
      const CellRef ref{wire, cell};
      const Vec3& m = ws.m[cell];
      g.add_magnetic(ch, in, BranchKind::Series, iface_.series, ref, m);
      c.torque_branches.push_back(g.add_magnetic(ch, circuit::kGround, BranchKind::Shunt, iface_.shunt, ref, m));
      g.add_magnetic(in, fm, BranchKind::Series, fm_.series, ref, m);
      g.add_magnetic(in, circuit::kGround, BranchKind::Shunt, fm_.shunt, ref, m);
      g.add_magnetic(fm, circuit::kGround, BranchKind::Shunt, fm_.shunt, ref, m);
      if (weight != 0.0) c.sources.push_back(g.add_current_source(fm, 0.0));
      c.channel_nodes.push_back(ch);
      c.interface_nodes.push_back(in);
      c.fm_nodes.push_back(fm);
    }
    dev_.contacts.push_back(std::move(c));
    return static_cast<int>(dev_.contacts.size()) - 1;
  }

  // Charge-only reference to ground. With balanced sources it carries no current.
  void add_reference(int node) {
    Conductance4 ref;
    ref.g(0, 0) = 1.0;
    dev_.graph.add_shunt(node, ref);
  }

  Device finish() {
    dev_.graph.validate();
    dev_.set_drive(cfg_.drive.current);
    return std::move(dev_);
  }

  Device& dev() { return dev_; }
  int n_cells() const { return n_cells_; }
  int n_in() const { return n_in_; }
  int n_out() const { return n_out_; }
  double mesh() const { return mesh_; }

 private:
  const DeviceConfig& cfg_;
  Device dev_;
  double mesh_ = 0.0;
  int n_cells_ = 0;
  int n_in_ = 0;
  int n_out_ = 0;
  int n_damp_ = 0;
  int n_damp_out_ = 0;
  circuit::PiModel iface_;
  circuit::PiModel fm_;
};

}  // namespace

Device build_sv(const DeviceConfig& config) {
  DeviceConfig cfg = config;
  cfg.kind = DeviceKind::SpinValve;
  Builder b(cfg);
  const int w_in = b.add_wire("in", cfg.state.inputs.at(0), false);
  const int w_out = b.add_wire("out", cfg.state.output, true);

  const int c_in = b.add_contact("in", w_in, {b.n_cells() - b.n_in(), b.n_cells()}, 1.0);
  const int last_in = b.dev().contacts[c_in].channel_nodes.back();
  const int c_out = b.add_contact("out", w_out, {0, b.n_out()}, -1.0);
  // Node centres sit half a cell inside each contact edge.
  b.add_span(last_in, cfg.channel.l_NM + b.mesh(), "ch_gap_", b.dev().contacts[c_out].channel_nodes.front());
  b.add_reference(b.dev().contacts[c_out].channel_nodes.back());

  Device& d = b.dev();
  d.input_contacts = {c_in};
  d.output_contact = c_out;
  d.output_wire = w_out;
  return b.finish();
}

Device build_majority3(const DeviceConfig& config) {
  DeviceConfig cfg = config;
  cfg.kind = DeviceKind::Majority3;
  Builder b(cfg);
  static const char* names[] = {"in_a", "in_b", "in_c"};
  int wires[3];
  for (int k = 0; k < 3; ++k) wires[k] = b.add_wire(names[k], cfg.state.inputs.at(k), false);
  const int w_out = b.add_wire("out", cfg.state.output, true);

  const double arm_in = cfg.channel.junction_fraction * cfg.channel.l_NM + 0.5 * b.mesh();
  const double arm_out = (1.0 - cfg.channel.junction_fraction) * cfg.channel.l_NM + 0.5 * b.mesh();

  const int junction = b.channel_node("ch_junction");
  std::vector<int> inputs;
  for (int k = 0; k < 3; ++k) {
    const int c = b.add_contact(names[k], wires[k], {b.n_cells() - b.n_in(), b.n_cells()}, 1.0);
    b.add_span(b.dev().contacts[c].channel_nodes.back(), arm_in, std::string("ch_arm_") + names[k] + "_", junction);
    inputs.push_back(c);
  }
  const int c_out = b.add_contact("out", w_out, {0, b.n_out()}, -3.0);
  b.add_span(junction, arm_out, "ch_arm_out_", b.dev().contacts[c_out].channel_nodes.front());
  b.add_reference(b.dev().contacts[c_out].channel_nodes.back());

  Device& d = b.dev();
  d.input_contacts = inputs;
  d.output_contact = c_out;
  d.output_wire = w_out;
  return b.finish();
}

Device build_nlsv(const DeviceConfig& config) {
  DeviceConfig cfg = config;
  cfg.kind = DeviceKind::Nlsv;
  Builder b(cfg);
  const int w_in = b.add_wire("in", cfg.state.inputs.at(0), false);
  const int w_out = b.add_wire("out", cfg.state.output, true);

  const int c_in = b.add_contact("in", w_in, {b.n_cells() - b.n_in(), b.n_cells()}, 1.0);
  const auto& in_nodes = b.dev().contacts[c_in].channel_nodes;
  // Ground arm leaves from the outer edge of the injector; the ground is a spin sink.
  b.add_span(in_nodes.front(), cfg.channel.shunt_length + 0.5 * b.mesh(), "ch_gnd_", circuit::kGround);
  const int last_in = in_nodes.back();
  const int c_out = b.add_contact("out", w_out, {0, b.n_out()}, 0.0);
  b.add_span(last_in, cfg.channel.l_NM + b.mesh(), "ch_det_", b.dev().contacts[c_out].channel_nodes.front());

  Device& d = b.dev();
  d.input_contacts = {c_in};
  d.output_contact = c_out;
  d.output_wire = w_out;
  return b.finish();
}

Device build(const DeviceConfig& config) {
  switch (config.kind) {
    case DeviceKind::SpinValve: return build_sv(config);
    case DeviceKind::Majority3: return build_majority3(config);
    case DeviceKind::Nlsv: return build_nlsv(config);
  }
  throw ConfigError("unknown device kind");
}

int drive_polarity_semantics(DeviceKind kind, int drive_sign, const std::vector<int>& inputs) {
  if (drive_sign == 0) throw ConfigError("drive sign must be nonzero");
  int value = 0;
  if (kind == DeviceKind::Majority3) {
    if (inputs.size() != 3) throw ConfigError("majority gate needs three inputs");
    value = (inputs[0] + inputs[1] + inputs[2]) >= 2 ? 1 : 0;
  } else {
    if (inputs.size() != 1) throw ConfigError("two-terminal device needs one input");
    value = inputs[0];
  }
  return drive_sign < 0 ? value : 1 - value;
}

}  // namespace svl::device
