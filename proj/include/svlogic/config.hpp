#pragma once

// Flat INI-style device configuration.
//
//   [fm]
//   rho = 1.4e-7
//   l_FM = 300nm
//
// Values may carry a unit suffix matching the key's dimension (nm, ns, uA, K,
// ...); everything is stored in SI. Sections: device, fm, channel, interface,
// contacts, drive, sim, state.

#include "svlogic/devices.hpp"
#include "svlogic/errors.hpp"

#include <string>
#include <utility>
#include <vector>

namespace svl::config {

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& source, int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class Dimension {
  None,         // plain number
  Length,       // m, mm, um, nm, pm
  Time,         // s, ms, us, ns, ps, fs
  Current,      // A, mA, uA, nA
  Temperature,  // K
  Resistivity,  // Ohm.m
  Field,        // A/m
  Stiffness,    // J/m
  EnergyDensity,  // J/m^3
  AreaConductance,  // S/m^2
  Angle,        // rad, deg
  Count,
  Flag,
  Text
};

/// Parses "12.5nm", "1.5 ns", "-100uA", "3e-8" into SI. Throws ConfigError when
/// the suffix does not belong to `dim`.
double parse_quantity(const std::string& text, Dimension dim);

/// Material and geometry keys that every config file must define, as "section.key".
const std::vector<std::string>& required_keys();

/// Every accepted key as "section.key".
std::vector<std::string> known_keys();

device::DeviceConfig parse_config(const std::string& text, const std::string& source = "<string>",
                                  bool require_table1 = true);
device::DeviceConfig load_config(const std::string& path);

/// Applies "section.key=value" (or "key=value" when the key name is unique).
void apply_override(device::DeviceConfig& cfg, const std::string& assignment);
void set_value(device::DeviceConfig& cfg, const std::string& qualified_key, const std::string& value);

/// Every key with its canonical value, in file order.
std::vector<std::pair<std::string, std::string>> flatten(const device::DeviceConfig& cfg);

/// Canonical text form; parse_config(write_config(c)) == c.
std::string write_config(const device::DeviceConfig& cfg);

}  // namespace svl::config
