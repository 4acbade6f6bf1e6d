#include "svlogic/presets.hpp"

#include "svlogic/analysis.hpp"
#include "svlogic/config.hpp"
#include "svlogic/errors.hpp"
#include "svlogic/transient.hpp"

namespace svl::presets {

namespace {

Point point(std::string label, std::vector<Assignment> set) { return {std::move(label), std::move(set)}; }

std::vector<Point> sweep(const std::string& key, const std::vector<std::string>& values) {
  std::vector<Point> out;
  for (const auto& v : values) out.push_back(point(key.substr(key.find('.') + 1) + "=" + v, {{key, v}}));
  return out;
}

std::string bits(int a, int b, int c) {
  return std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c);
}

std::vector<Preset> make() {
  const std::vector<Assignment> sv{{"device.kind", "sv"}, {"state.inputs", "1"}, {"state.output", "1"},
                                   {"drive.current", "200uA"}};
  const std::vector<Assignment> nlsv{{"device.kind", "nlsv"},        {"state.inputs", "1"},
                                     {"state.output", "1"},          {"drive.current", "200uA"},
                                     {"contacts.L_input", "10nm"},   {"contacts.L_output", "10nm"}};
  auto with = [](std::vector<Assignment> base, std::vector<Assignment> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };

  std::vector<Preset> p;
  p.push_back({"fig4-damping", "Fig. 4", "SV inverter, damping at the wire end",
               with(sv, {{"contacts.L_input", "20nm"}}), sweep("contacts.alpha_end", {"0.18", "0.5"})});
  p.push_back({"fig5-input-length", "Fig. 5", "SV inverter, input contact length", sv,
               sweep("contacts.L_input", {"20nm", "40nm", "60nm", "100nm"})});
  p.push_back({"fig6-output-length", "Fig. 6", "SV inverter, output contact length", sv,
               sweep("contacts.L_output", {"10nm", "20nm", "40nm", "100nm"})});
  p.push_back({"fig7-current", "Fig. 7", "SV inverter, drive current", sv,
               sweep("drive.current", {"100uA", "140uA", "200uA", "260uA"})});
  p.push_back({"fig8-inverter", "Fig. 8", "SV from the parallel state under both polarities", sv,
               {point("current=+200uA", {{"drive.current", "200uA"}}),
                point("current=-200uA", {{"drive.current", "-200uA"}})}});
  p.push_back({"fig9-buffer", "Fig. 9", "SV from the anti-parallel state under both polarities",
               with(sv, {{"state.output", "0"}}),
               {point("current=-200uA", {{"drive.current", "-200uA"}}),
                point("current=+200uA", {{"drive.current", "200uA"}})}});

  std::vector<Point> patterns;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        // Start the output opposite to the expected majority so every pattern must switch.
        const int start = 1 - analysis::majority(a, b, c);
        patterns.push_back(point("inputs=" + std::to_string(a) + std::to_string(b) + std::to_string(c),
                                 {{"state.inputs", bits(a, b, c)}, {"state.output", std::to_string(start)}}));
      }
    }
  }
  p.push_back({"fig10-majority", "Fig. 10", "three-input majority gate, -100uA per input, all patterns",
               {{"device.kind", "majority3"}, {"drive.current", "-100uA"}}, patterns});

  p.push_back({"fig11-nlsv-output-length", "Fig. 11", "NLSV, output contact length", nlsv,
               sweep("contacts.L_output", {"10nm", "20nm", "40nm"})});
  p.push_back({"fig12-nlsv-input-length", "Fig. 12", "NLSV, input contact length", nlsv,
               sweep("contacts.L_input", {"10nm", "20nm", "40nm"})});
  p.push_back({"fig13-nlsv-current", "Fig. 13", "NLSV, drive current", nlsv,
               sweep("drive.current", {"100uA", "140uA", "200uA", "260uA"})});
  p.push_back({"table2", "Table 2", "SV (40nm, 20nm) and NLSV (10nm, 10nm) inverters at 200uA",
               {{"drive.current", "200uA"}, {"state.inputs", "1"}, {"state.output", "1"}},
               {point("SV-40nm-20nm", with(sv, {{"contacts.L_input", "40nm"}, {"contacts.L_output", "20nm"}})),
                point("NLSV-10nm-10nm", nlsv)}});
  p.push_back({"table3", "Table 3", "majority gate switching, -100uA per input",
               {{"device.kind", "majority3"}, {"drive.current", "-100uA"}},
               {point("inputs=111", {{"state.inputs", "1,1,1"}, {"state.output", "0"}}),
                point("inputs=000", {{"state.inputs", "0,0,0"}, {"state.output", "1"}})}});
  return p;
}

}  // namespace

device::DeviceConfig calibrated_config() {
  device::DeviceConfig cfg;
  cfg.drive.current_scale = kCalibratedCurrentScale;
  cfg.contacts.damping_scale = kCalibratedDampingScale;
  cfg.contacts.output_damping_length = kCalibratedOutputDamping;
  cfg.sim.torque_mode = device::TorqueMode::ContactAveraged;
  cfg.sim.temperature = 300.0;
  cfg.sim.sample_stride = 50;
  return cfg;
}

const std::vector<Preset>& all() {
  static const std::vector<Preset> presets = make();
  return presets;
}

const Preset& find(const std::string& name) {
  for (const auto& p : all()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

device::DeviceConfig point_config(const Preset& preset, const Point& pt, const device::DeviceConfig& base) {
  device::DeviceConfig cfg = base;
  for (const auto& a : preset.base) config::set_value(cfg, a.key, a.value);
  for (const auto& a : pt.set) config::set_value(cfg, a.key, a.value);
  return cfg;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& key) {
  return transient::splitmix64(master ^ fnv1a64(key));
}

}  // namespace svl::presets
