#pragma once

// One-dimensional chain of exchange-coupled macrospins driven by the stochastic
// Landau-Lifshitz-Gilbert equation with spin-transfer torque.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace svl::mag {

using Vec3 = Eigen::Vector3d;
using Rng = std::mt19937_64;

struct DemagFactors {
  double nx = 0.0;
  double ny = 2.0 / 22.0;
  double nz = 20.0 / 22.0;
};

/// Infinite strip along x with the given cross-section.
DemagFactors strip_demag(double width, double thickness);

/// Rectangular prism (Aharoni). Dimensions are full edge lengths along x, y, z.
DemagFactors prism_demag(double lx, double ly, double lz);

struct MaterialFM {
  double ms = 8e5;          // A/m
  double a_ex = 1.3e-11;    // J/m
  double k_u = 0.0;         // J/m^3, easy axis x
  DemagFactors demag;
  double gamma = 1.76085963023e11;  // 1/(s·T)
  double temperature = 0.0;         // K
  Vec3 applied_field = Vec3::Zero();  // A/m

  void validate() const;
};

struct CellRange {
  int begin = 0;
  int end = 0;  // exclusive
};

struct WireState {
  std::vector<Vec3> m;
  std::vector<double> alpha;
  double mesh = 2e-9;
  double width = 20e-9;
  double thickness = 2e-9;

  int n_cells() const { return static_cast<int>(m.size()); }
  double cell_volume() const { return mesh * width * thickness; }
  double length() const { return mesh * n_cells(); }
  double x(int cell) const { return (cell + 0.5) * mesh; }
  Vec3 average() const;
  /// Average over [r.begin, r.end).
  Vec3 average(CellRange r) const;
  double max_norm_error() const;
};

/// Spin current absorbed per cell (A, electron spin flow convention). Empty
/// means no torque.
struct TorqueField {
  std::vector<Vec3> spin_current;
};

/// Number of Bohr magnetons 2 Ms V / (gamma hbar).
double bohr_magneton_count(double ms, double volume, double gamma);

/// Anisotropy + shape + exchange + applied field at `cell`, A/m. Thermal noise
/// is added by the integrator.
Vec3 effective_field(const WireState& state, const MaterialFM& mat, int cell);

/// Standard deviation of each thermal field component.
double thermal_sigma(const MaterialFM& mat, double alpha, double volume, double dt);

Vec3 thermal_field(const MaterialFM& mat, double alpha, double volume, double dt, Rng& rng);

/// Exchange + demag + anisotropy + Zeeman energy, J.
double micromagnetic_energy(const WireState& state, const MaterialFM& mat);

inline constexpr double kMaxTimeStep = 1e-12;

/// Heun predictor-corrector for the explicit (Landau-Lifshitz) form of the
/// stochastic LLG equation. Holds scratch buffers so repeated steps do not
/// allocate.
class LlgIntegrator {
 public:
  void step(WireState& state, const MaterialFM& mat, const TorqueField* torque, double dt, Rng& rng);

 private:
  std::vector<Vec3> h_th_;
  std::vector<Vec3> h_eff_;
  std::vector<Vec3> k1_;
  std::vector<Vec3> m0_;
};

/// Value-semantics single step.
WireState llg_step(WireState state, const MaterialFM& mat, const TorqueField& torque, double dt, Rng& rng);

void set_damping_profile(WireState& state, CellRange region, double alpha_end);

/// Uniform wire along `direction` (+1 or -1 along x).
WireState init_wire(int n_cells, double mesh, double width, double thickness, int direction, double alpha);

/// Transverse wall between a `left` domain (+1/-1 along x) and the opposite
/// domain, centred at `position`. The wall rotates through `chirality` * y;
/// `tilt` lifts the wall moment out of plane by that angle (rad), which is what
/// sets an isolated wall in motion.
WireState init_domain_wall(int n_cells, double mesh, double width, double thickness, double alpha,
                           const MaterialFM& mat, double position, int chirality, int left = 1, double tilt = 0.0);

/// Wall width pi * sqrt(2A / (mu0 Ms^2 (Ny - Nx))).
double wall_width(const MaterialFM& mat);

/// Snapshot CSV: cell, x_m, mx, my, mz, alpha.
void write_wire_csv(std::ostream& out, const WireState& state);

}  // namespace svl::mag
