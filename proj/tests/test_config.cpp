#include "svlogic/config.hpp"
#include "svlogic/presets.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace svl;
using namespace svl::config;

namespace {

const char* kRequiredOnly = R"(# required keys only
[fm]
rho = 1.4e-7
beta = 0.6
l_sf_par = 5nm
l_sf_perp = 0.8nm
M_s = 8e5
A = 1.3e-11
alpha = 0.007
l_FM = 300nm
w_FM = 20nm
t_FM = 2nm

[channel]
l_NM = 70nm
w_NM = 20nm
t_NM = 20nm

[interface]
G_uu = 0.9e15
G_dd = 0.1e15
G_ud = 0.39e15
)";

std::string read(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("quantities with units") {
  CHECK(parse_quantity("12.5nm", Dimension::Length) == doctest::Approx(12.5e-9));
  CHECK(parse_quantity("1.5 ns", Dimension::Time) == doctest::Approx(1.5e-9));
  CHECK(parse_quantity("-100uA", Dimension::Current) == doctest::Approx(-100e-6));
  CHECK(parse_quantity("300K", Dimension::Temperature) == 300.0);
  CHECK(parse_quantity("3e-8", Dimension::Resistivity) == 3e-8);
  CHECK(parse_quantity("20fs", Dimension::Time) == doctest::Approx(2e-14));
  CHECK(parse_quantity("90deg", Dimension::Angle) == doctest::Approx(1.5707963267948966));
  CHECK_THROWS_AS(parse_quantity("12ns", Dimension::Length), ConfigError);
  CHECK_THROWS_AS(parse_quantity("abc", Dimension::Length), ConfigError);
}

TEST_CASE("required-keys file loads to the defaults") {
  const auto c = parse_config(kRequiredOnly);
  CHECK(flatten(c) == flatten(device::DeviceConfig{}));
}

TEST_CASE("missing keys are named") {
  std::string text = kRequiredOnly;
  text.erase(text.find("beta = 0.6\n"), 11);
  const auto msg = error_of([&] { parse_config(text, "cfg.ini"); });
  CHECK(msg.find("missing required key 'beta' in [fm]") != std::string::npos);
}

TEST_CASE("parse errors carry line and column") {
  auto at = [](const std::string& text) {
    try {
      parse_config(text, "x.ini", false);
    } catch (const ParseError& e) {
      return std::make_pair(e.line(), e.column());
    }
    return std::make_pair(0, 0);
  };
  CHECK(at("[fm]\nrho = 1\n[nope]\n") == std::make_pair(3, 2));
  CHECK(at("[fm]\n  bogus = 1\n") == std::make_pair(2, 3));
  CHECK(at("[fm]\nrho = 1\nrho = 2\n").first == 3);
  CHECK(at("rho = 1\n").first == 1);
  CHECK(at("[fm]\nrho\n").first == 2);
  CHECK(at("[fm]\nrho = 1\n[fm]\n").first == 3);
  CHECK(at("[sim]\ndt = 3nm\n").first == 2);
  const auto msg = error_of([] { parse_config("[contacts]\nL_input = 4 parsecs\n", "c.ini", false); });
  CHECK(msg.rfind("c.ini:2:", 0) == 0);
}

TEST_CASE("write and parse round trip") {
  auto c = presets::calibrated_config();
  c.kind = device::DeviceKind::Majority3;
  c.state.inputs = {1, 0, 1};
  c.state.output = 0;
  c.sim.seed = 0xFFFFFFFFFFFFull;
  c.drive.current = -1.2345678901234567e-4;
  c.fm.demag = device::DemagMode::Prism;
  const auto back = parse_config(write_config(c));
  CHECK(write_config(back) == write_config(c));
  CHECK(back.drive.current == c.drive.current);
  CHECK(back.sim.seed == c.sim.seed);
  CHECK(back.state.inputs == c.state.inputs);
}

TEST_CASE("overrides") {
  device::DeviceConfig c;
  apply_override(c, "drive.current=-100uA");
  CHECK(c.drive.current == doctest::Approx(-100e-6));
  apply_override(c, "alpha_end=0.5");
  CHECK(c.contacts.alpha_end == 0.5);
  apply_override(c, "sim.torque_mode = contact-averaged");
  CHECK(c.sim.torque_mode == device::TorqueMode::ContactAveraged);
  CHECK_THROWS_AS(apply_override(c, "nonsense=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "current"), ConfigError);
  for (const auto& k : known_keys()) CHECK(k.find('.') != std::string::npos);
}

TEST_CASE("shipped default config is the calibrated config") {
  const auto c = load_config(SVLOGIC_SOURCE_DIR "/configs/default.ini");
  CHECK(flatten(c) == flatten(presets::calibrated_config()));
  CHECK(read(SVLOGIC_SOURCE_DIR "/configs/default.ini").find("[fm]") != std::string::npos);
}
