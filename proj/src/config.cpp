#include "svlogic/config.hpp"

#include "svlogic/constants.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace svl::config {

ParseError::ParseError(const std::string& source, int line, int column, const std::string& what)
    : ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

using device::DeviceConfig;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, double>& units_for(Dimension dim) {
  static const std::map<std::string, double> none{{"", 1.0}};
  static const std::map<std::string, double> length{{"", 1.0}, {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6},
                                                    {"nm", 1e-9}, {"pm", 1e-12}};
  static const std::map<std::string, double> time{{"", 1.0},   {"s", 1.0},    {"ms", 1e-3},
                                                  {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
  static const std::map<std::string, double> current{{"", 1.0}, {"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}, {"nA", 1e-9}};
  static const std::map<std::string, double> temperature{{"", 1.0}, {"K", 1.0}};
  static const std::map<std::string, double> resistivity{{"", 1.0}, {"Ohm.m", 1.0}, {"Ohm*m", 1.0}};
  static const std::map<std::string, double> field{{"", 1.0}, {"A/m", 1.0}};
  static const std::map<std::string, double> stiffness{{"", 1.0}, {"J/m", 1.0}};
  static const std::map<std::string, double> density{{"", 1.0}, {"J/m^3", 1.0}, {"J/m3", 1.0}};
  static const std::map<std::string, double> area_g{{"", 1.0}, {"S/m^2", 1.0}, {"S/m2", 1.0}};
  static const std::map<std::string, double> angle{{"", 1.0}, {"rad", 1.0}, {"deg", phys::kPi / 180.0}};
  switch (dim) {
    case Dimension::Length: return length;
    case Dimension::Time: return time;
    case Dimension::Current: return current;
    case Dimension::Temperature: return temperature;
    case Dimension::Resistivity: return resistivity;
    case Dimension::Field: return field;
    case Dimension::Stiffness: return stiffness;
    case Dimension::EnergyDensity: return density;
    case Dimension::AreaConductance: return area_g;
    case Dimension::Angle: return angle;
    default: return none;
  }
}

long parse_integer(const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("expected an integer, got '" + t + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || *end != '\0' || errno == ERANGE) {
    throw ConfigError("expected a non-negative integer, got '" + t + "'");
  }
  return v;
}

bool parse_flag(const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError("expected true/false, got '" + trim(text) + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Key {
  std::string section;
  std::string name;
  Dimension dim;
  std::function<void(DeviceConfig&, const std::string&)> set;
  std::function<std::string(const DeviceConfig&)> get;
};

template <typename F>
Key real_key(const std::string& sec, const std::string& name, Dimension dim, F field) {
  return {sec, name, dim, [field, dim](DeviceConfig& c, const std::string& v) { *field(c) = parse_quantity(v, dim); },
          [field](const DeviceConfig& c) { return fmt(*field(const_cast<DeviceConfig&>(c))); }};
}

template <typename F>
Key int_key(const std::string& sec, const std::string& name, F field) {
  return {sec, name, Dimension::Count,
          [field](DeviceConfig& c, const std::string& v) { *field(c) = static_cast<int>(parse_integer(v)); },
          [field](const DeviceConfig& c) { return std::to_string(*field(const_cast<DeviceConfig&>(c))); }};
}

template <typename F>
Key flag_key(const std::string& sec, const std::string& name, F field) {
  return {sec, name, Dimension::Flag, [field](DeviceConfig& c, const std::string& v) { *field(c) = parse_flag(v); },
          [field](const DeviceConfig& c) { return std::string(*field(const_cast<DeviceConfig&>(c)) ? "true" : "false"); }};
}

std::string demag_name(device::DemagMode m) { return m == device::DemagMode::Prism ? "prism" : "strip"; }
std::string torque_name(device::TorqueMode m) {
  return m == device::TorqueMode::ContactAveraged ? "contact-averaged" : "per-cell";
}

std::vector<int> parse_bits(const std::string& text) {
  std::vector<int> bits;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const long b = parse_integer(item);
    if (b != 0 && b != 1) throw ConfigError("bits must be 0 or 1, got " + trim(item));
    bits.push_back(static_cast<int>(b));
  }
  if (bits.empty()) throw ConfigError("expected a comma-separated bit list");
  return bits;
}

const std::vector<Key>& keys() {
  using D = Dimension;
  using C = DeviceConfig;
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"device", "kind", D::Text,
                 [](C& c, const std::string& v) { c.kind = device::device_kind_from_string(trim(v)); },
                 [](const C& c) { return device::to_string(c.kind); }});

    k.push_back(real_key("fm", "rho", D::Resistivity, [](C& c) { return &c.fm.rho; }));
    k.push_back(real_key("fm", "beta", D::None, [](C& c) { return &c.fm.beta; }));
    k.push_back(real_key("fm", "l_sf_par", D::Length, [](C& c) { return &c.fm.l_sf_par; }));
    k.push_back(real_key("fm", "l_sf_perp", D::Length, [](C& c) { return &c.fm.l_sf_perp; }));
    k.push_back(real_key("fm", "M_s", D::Field, [](C& c) { return &c.fm.M_s; }));
    k.push_back(real_key("fm", "A", D::Stiffness, [](C& c) { return &c.fm.A; }));
    k.push_back(real_key("fm", "alpha", D::None, [](C& c) { return &c.fm.alpha; }));
    k.push_back(real_key("fm", "K_u", D::EnergyDensity, [](C& c) { return &c.fm.K_u; }));
    k.push_back(real_key("fm", "l_FM", D::Length, [](C& c) { return &c.fm.l_FM; }));
    k.push_back(real_key("fm", "w_FM", D::Length, [](C& c) { return &c.fm.w_FM; }));
    k.push_back(real_key("fm", "t_FM", D::Length, [](C& c) { return &c.fm.t_FM; }));
    k.push_back(real_key("fm", "gamma", D::None, [](C& c) { return &c.fm.gamma; }));
    k.push_back({"fm", "demag", D::Text,
                 [](C& c, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "strip") {
                     c.fm.demag = device::DemagMode::Strip;
                   } else if (t == "prism") {
                     c.fm.demag = device::DemagMode::Prism;
                   } else {
                     throw ConfigError("demag must be strip or prism, got '" + t + "'");
                   }
                 },
                 [](const C& c) { return demag_name(c.fm.demag); }});

    k.push_back(real_key("channel", "l_NM", D::Length, [](C& c) { return &c.channel.l_NM; }));
    k.push_back(real_key("channel", "w_NM", D::Length, [](C& c) { return &c.channel.w_NM; }));
    k.push_back(real_key("channel", "t_NM", D::Length, [](C& c) { return &c.channel.t_NM; }));
    k.push_back(real_key("channel", "rho_N", D::Resistivity, [](C& c) { return &c.channel.rho_N; }));
    k.push_back(real_key("channel", "lambda_N", D::Length, [](C& c) { return &c.channel.lambda_N; }));
    k.push_back(real_key("channel", "gap_mesh", D::Length, [](C& c) { return &c.channel.gap_mesh; }));
    k.push_back(real_key("channel", "junction_fraction", D::None, [](C& c) { return &c.channel.junction_fraction; }));
    k.push_back(real_key("channel", "shunt_length", D::Length, [](C& c) { return &c.channel.shunt_length; }));

    k.push_back(real_key("interface", "G_uu", D::AreaConductance, [](C& c) { return &c.interface.g_up; }));
    k.push_back(real_key("interface", "G_dd", D::AreaConductance, [](C& c) { return &c.interface.g_down; }));
    k.push_back(real_key("interface", "G_ud", D::AreaConductance, [](C& c) { return &c.interface.g_mix; }));
    k.push_back(real_key("interface", "G_ud_imag", D::AreaConductance, [](C& c) { return &c.interface.g_mix_imag; }));
    k.push_back(real_key("interface", "mix_factor", D::None, [](C& c) { return &c.interface.mix_factor; }));

    k.push_back(real_key("contacts", "L_input", D::Length, [](C& c) { return &c.contacts.L_input; }));
    k.push_back(real_key("contacts", "L_output", D::Length, [](C& c) { return &c.contacts.L_output; }));
    k.push_back(real_key("contacts", "alpha_end", D::None, [](C& c) { return &c.contacts.alpha_end; }));
    k.push_back(real_key("contacts", "damping_length", D::Length, [](C& c) { return &c.contacts.damping_length; }));
    k.push_back(real_key("contacts", "damping_scale", D::None, [](C& c) { return &c.contacts.damping_scale; }));
    k.push_back(flag_key("contacts", "damp_output_end", [](C& c) { return &c.contacts.damp_output_end; }));
    k.push_back(real_key("contacts", "output_damping_length", D::Length,
                         [](C& c) { return &c.contacts.output_damping_length; }));

    k.push_back(real_key("drive", "current", D::Current, [](C& c) { return &c.drive.current; }));
    k.push_back(real_key("drive", "pulse", D::Time, [](C& c) { return &c.drive.pulse; }));
    k.push_back(flag_key("drive", "early_cutoff", [](C& c) { return &c.drive.early_cutoff; }));
    k.push_back(real_key("drive", "current_scale", D::None, [](C& c) { return &c.drive.current_scale; }));

    k.push_back(real_key("sim", "temperature", D::Temperature, [](C& c) { return &c.sim.temperature; }));
    k.push_back(real_key("sim", "dt", D::Time, [](C& c) { return &c.sim.dt; }));
    k.push_back(real_key("sim", "duration", D::Time, [](C& c) { return &c.sim.duration; }));
    k.push_back(real_key("sim", "mesh", D::Length, [](C& c) { return &c.sim.mesh; }));
    k.push_back(int_key("sim", "refresh_stride", [](C& c) { return &c.sim.refresh_stride; }));
    k.push_back(int_key("sim", "sample_stride", [](C& c) { return &c.sim.sample_stride; }));
    k.push_back({"sim", "seed", D::Count, [](C& c, const std::string& v) { c.sim.seed = parse_unsigned(v); },
                 [](const C& c) { return std::to_string(c.sim.seed); }});
    k.push_back(real_key("sim", "init_tilt", D::Angle, [](C& c) { return &c.sim.init_tilt; }));
    k.push_back({"sim", "torque_mode", D::Text,
                 [](C& c, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "per-cell") {
                     c.sim.torque_mode = device::TorqueMode::PerCell;
                   } else if (t == "contact-averaged") {
                     c.sim.torque_mode = device::TorqueMode::ContactAveraged;
                   } else {
                     throw ConfigError("torque_mode must be per-cell or contact-averaged, got '" + t + "'");
                   }
                 },
                 [](const C& c) { return torque_name(c.sim.torque_mode); }});

    k.push_back({"state", "inputs", D::Text, [](C& c, const std::string& v) { c.state.inputs = parse_bits(v); },
                 [](const C& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.state.inputs.size(); ++i) {
                     if (i) s += ',';
                     s += std::to_string(c.state.inputs[i]);
                   }
                   return s;
                 }});
    k.push_back(int_key("state", "output", [](C& c) { return &c.state.output; }));
    return k;
  }();
  return table;
}

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys()) {
    if (k.section == section && k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

double parse_quantity(const std::string& text, Dimension dim) {
  const std::string t = trim(text);
  if (dim == Dimension::Count || dim == Dimension::Flag || dim == Dimension::Text) {
    throw ConfigError("not a numeric dimension");
  }
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || errno == ERANGE) throw ConfigError("expected a number, got '" + t + "'");
  const std::string unit = trim(std::string(end));
  const auto& table = units_for(dim);
  const auto it = table.find(unit);
  if (it == table.end()) throw ConfigError("unit '" + unit + "' does not fit this key");
  double si = v * it->second;
  // Decimal prefixes shift the exponent so "0.8nm" parses exactly like "0.8e-9".
  const double digits = std::log10(it->second);
  if (it->second != 1.0 && digits == std::round(digits)) {
    const std::string number = t.substr(0, static_cast<std::size_t>(end - t.c_str()));
    const auto e = number.find_first_of("eE");
    const long exp10 = (e == std::string::npos ? 0L : std::strtol(number.c_str() + e + 1, nullptr, 10)) +
                       std::lround(digits);
    si = std::strtod((number.substr(0, e) + "e" + std::to_string(exp10)).c_str(), nullptr);
  }
  if (!std::isfinite(si)) throw ConfigError("value '" + t + "' is not finite");
  return si;
}

const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> req{
      "fm.rho",  "fm.beta", "fm.l_sf_par", "fm.l_sf_perp", "fm.M_s",       "fm.A",         "fm.alpha",
      "fm.l_FM", "fm.w_FM", "fm.t_FM",     "channel.l_NM", "channel.w_NM", "channel.t_NM", "interface.G_uu",
      "interface.G_dd",     "interface.G_ud"};
  return req;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.section + "." + k.name);
  return out;
}

device::DeviceConfig parse_config(const std::string& text, const std::string& source, bool require_table1) {
  DeviceConfig cfg;
  std::set<std::string> seen_sections;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    const std::string body = trim(line);

    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError(source, line_no, indent, "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      bool known = false;
      for (const auto& k : keys()) known = known || k.section == section;
      if (!known) throw ParseError(source, line_no, indent + 1, "unknown section [" + section + "]");
      if (!seen_sections.insert(section).second) {
        throw ParseError(source, line_no, indent + 1, "section [" + section + "] appears twice");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, indent, "expected key = value");
    const std::string name = trim(line.substr(0, eq));
    if (section.empty()) throw ParseError(source, line_no, indent, "key '" + name + "' outside any section");
    const Key* key = find_key(section, name);
    if (!key) throw ParseError(source, line_no, indent, "unknown key '" + name + "' in [" + section + "]");
    if (!seen.insert(section + "." + name).second) {
      throw ParseError(source, line_no, indent, "key '" + name + "' set twice in [" + section + "]");
    }
    const std::string value = line.substr(eq + 1);
    const auto first = value.find_first_not_of(" \t");
    const int value_col = static_cast<int>(eq) + 2 + (first == std::string::npos ? 0 : static_cast<int>(first));
    try {
      key->set(cfg, value);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_no, value_col, name + ": " + e.what());
    }
  }
  if (require_table1) {
    for (const auto& r : required_keys()) {
      if (!seen.count(r)) {
        const auto dot = r.find('.');
        throw ConfigError(source + ": missing required key '" + r.substr(dot + 1) + "' in [" + r.substr(0, dot) + "]");
      }
    }
  }
  return cfg;
}

device::DeviceConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

void set_value(device::DeviceConfig& cfg, const std::string& qualified_key, const std::string& value) {
  const auto dot = qualified_key.find('.');
  const Key* key = nullptr;
  if (dot != std::string::npos) {
    key = find_key(qualified_key.substr(0, dot), qualified_key.substr(dot + 1));
  } else {
    for (const auto& k : keys()) {
      if (k.name != qualified_key) continue;
      if (key) throw ConfigError("key '" + qualified_key + "' is ambiguous; qualify it with its section");
      key = &k;
    }
  }
  if (!key) throw ConfigError("unknown key '" + qualified_key + "'");
  try {
    key->set(cfg, value);
  } catch (const Error& e) {
    throw ConfigError(qualified_key + ": " + e.what());
  }
}

void apply_override(device::DeviceConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like key=value");
  set_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::vector<std::pair<std::string, std::string>> flatten(const device::DeviceConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.section + "." + k.name, k.get(cfg));
  return out;
}

std::string write_config(const device::DeviceConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace svl::config
