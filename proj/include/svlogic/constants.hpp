#pragma once

namespace svl::phys {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMu0 = 1.25663706212e-6;        // T·m/A
inline constexpr double kElectronCharge = 1.602176634e-19;  // C
inline constexpr double kHbar = 1.054571817e-34;        // J·s
inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kGyromagnetic = 1.76085963023e11;  // 1/(s·T)
inline constexpr double kBohrMagneton = 9.2740100783e-24;  // J/T

}  // namespace svl::phys
