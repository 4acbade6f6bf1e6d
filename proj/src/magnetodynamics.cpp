#include "svlogic/magnetodynamics.hpp"

#include "svlogic/constants.hpp"
#include "svlogic/errors.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace svl::mag {

using phys::kMu0;

DemagFactors strip_demag(double width, double thickness) {
  if (!(width > 0.0 && thickness > 0.0)) throw InvalidGeometry("strip cross-section must be positive");
  return {0.0, thickness / (width + thickness), width / (width + thickness)};
}

namespace {

// Aharoni, J. Appl. Phys. 83, 3432 (1998): factor along c for a prism 2a x 2b x 2c.
double aharoni_dz(double a, double b, double c) {
  const double abc = std::sqrt(a * a + b * b + c * c);
  const double ab = std::sqrt(a * a + b * b);
  const double bc = std::sqrt(b * b + c * c);
  const double ac = std::sqrt(a * a + c * c);
  double s = 0.0;
  s += (b * b - c * c) / (2 * b * c) * std::log((abc - a) / (abc + a));
  s += (a * a - c * c) / (2 * a * c) * std::log((abc - b) / (abc + b));
  s += b / (2 * c) * std::log((ab + a) / (ab - a));
  s += a / (2 * c) * std::log((ab + b) / (ab - b));
  s += c / (2 * a) * std::log((bc - b) / (bc + b));
  s += c / (2 * b) * std::log((ac - a) / (ac + a));
  s += 2 * std::atan(a * b / (c * abc));
  s += (a * a * a + b * b * b - 2 * c * c * c) / (3 * a * b * c);
  s += (a * a + b * b - 2 * c * c) / (3 * a * b * c) * abc;
  s += c / (a * b) * (ac + bc);
  s -= (std::pow(ab, 3) + std::pow(bc, 3) + std::pow(ac, 3)) / (3 * a * b * c);
  return s / phys::kPi;
}

}  // namespace

DemagFactors prism_demag(double lx, double ly, double lz) {
  if (!(lx > 0.0 && ly > 0.0 && lz > 0.0)) throw InvalidGeometry("prism dimensions must be positive");
  const double a = lx / 2, b = ly / 2, c = lz / 2;
  return {aharoni_dz(b, c, a), aharoni_dz(c, a, b), aharoni_dz(a, b, c)};
}

void MaterialFM::validate() const {
  if (!(ms > 0.0)) throw ConfigError("saturation magnetization must be positive");
  if (!(a_ex >= 0.0)) throw ConfigError("exchange constant must be non-negative");
  if (!(gamma > 0.0)) throw ConfigError("gyromagnetic ratio must be positive");
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be non-negative");
  const double sum = demag.nx + demag.ny + demag.nz;
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ConfigError("demagnetizing factors must sum to one, got " + std::to_string(sum));
  }
}

Vec3 WireState::average() const { return average({0, n_cells()}); }

Vec3 WireState::average(CellRange r) const {
  Vec3 s = Vec3::Zero();
  for (int i = r.begin; i < r.end; ++i) s += m[i];
  return r.end > r.begin ? Vec3(s / (r.end - r.begin)) : s;
}

double WireState::max_norm_error() const {
  double e = 0.0;
  for (const auto& v : m) e = std::max(e, std::abs(v.norm() - 1.0));
  return e;
}

double bohr_magneton_count(double ms, double volume, double gamma) {
  return 2.0 * ms * volume / (gamma * phys::kHbar);
}

namespace {

inline Vec3 local_field(const Vec3& m, const MaterialFM& mat) {
  const double hk = 2.0 * mat.k_u / (kMu0 * mat.ms);
  return Vec3(hk * m.x() - mat.ms * mat.demag.nx * m.x(), -mat.ms * mat.demag.ny * m.y(),
              -mat.ms * mat.demag.nz * m.z()) +
         mat.applied_field;
}

// Mirror ends: a missing neighbour is replaced by the cell itself.
inline Vec3 laplacian(const std::vector<Vec3>& m, int i) {
  const int n = static_cast<int>(m.size());
  const Vec3& left = i > 0 ? m[i - 1] : m[i];
  const Vec3& right = i + 1 < n ? m[i + 1] : m[i];
  return left - 2.0 * m[i] + right;
}

void fields(const std::vector<Vec3>& m, const WireState& geom, const MaterialFM& mat, std::vector<Vec3>& h) {
  const double exch = 2.0 * mat.a_ex / (kMu0 * mat.ms * geom.mesh * geom.mesh);
  const int n = static_cast<int>(m.size());
  h.resize(n);
  for (int i = 0; i < n; ++i) h[i] = local_field(m[i], mat) + exch * laplacian(m, i);
}

// Landau-Lifshitz right-hand side equivalent to the Gilbert form with the
// Slonczewski term m x (Is x m) / (e Ns).
inline Vec3 llg_rhs(const Vec3& m, const Vec3& h, double alpha, double gmu0, const Vec3& is, double stt_rate) {
  Vec3 g = -gmu0 * m.cross(h);
  if (stt_rate != 0.0) g += stt_rate * m.cross(is.cross(m));
  return (g + alpha * m.cross(g)) / (1.0 + alpha * alpha);
}

}  // namespace

Vec3 effective_field(const WireState& state, const MaterialFM& mat, int cell) {
  const double exch = 2.0 * mat.a_ex / (kMu0 * mat.ms * state.mesh * state.mesh);
  return local_field(state.m[cell], mat) + exch * laplacian(state.m, cell);
}

double thermal_sigma(const MaterialFM& mat, double alpha, double volume, double dt) {
  if (!(dt > 0.0)) throw StabilityError("time step must be positive");
  if (mat.temperature <= 0.0) return 0.0;
  return std::sqrt(2.0 * alpha * phys::kBoltzmann * mat.temperature /
                   (mat.gamma * kMu0 * kMu0 * mat.ms * volume * dt));
}

Vec3 thermal_field(const MaterialFM& mat, double alpha, double volume, double dt, Rng& rng) {
  const double sigma = thermal_sigma(mat, alpha, volume, dt);
  if (sigma == 0.0) return Vec3::Zero();
  std::normal_distribution<double> n01;
  Vec3 h;
  h.x() = sigma * n01(rng);
  h.y() = sigma * n01(rng);
  h.z() = sigma * n01(rng);
  return h;
}

double micromagnetic_energy(const WireState& state, const MaterialFM& mat) {
  const double v = state.cell_volume();
  const double area = state.width * state.thickness;
  double e = 0.0;
  for (int i = 0; i < state.n_cells(); ++i) {
    const Vec3& m = state.m[i];
    const double demag =
        0.5 * kMu0 * mat.ms * mat.ms * (mat.demag.nx * m.x() * m.x() + mat.demag.ny * m.y() * m.y() +
                                        mat.demag.nz * m.z() * m.z());
    const double aniso = -mat.k_u * m.x() * m.x();
    const double zeeman = -kMu0 * mat.ms * m.dot(mat.applied_field);
    e += v * (demag + aniso + zeeman);
    if (i + 1 < state.n_cells()) e += mat.a_ex * area * (state.m[i + 1] - m).squaredNorm() / state.mesh;
  }
  return e;
}

void LlgIntegrator::step(WireState& state, const MaterialFM& mat, const TorqueField* torque, double dt, Rng& rng) {
  if (!(dt > 0.0) || dt > kMaxTimeStep) {
    std::ostringstream os;
    os << "time step " << dt << " s outside (0, " << kMaxTimeStep << "] s";
    throw StabilityError(os.str());
  }
  const int n = state.n_cells();
  const double gmu0 = mat.gamma * kMu0;
  const double volume = state.cell_volume();
  const bool has_torque = torque && !torque->spin_current.empty();
  if (has_torque && static_cast<int>(torque->spin_current.size()) != n) {
    throw InvalidGeometry("torque field size does not match the wire");
  }
  const double stt_rate = has_torque ? 1.0 / (phys::kElectronCharge * bohr_magneton_count(mat.ms, volume, mat.gamma)) : 0.0;
  static const Vec3 kNoTorque = Vec3::Zero();

  // One thermal realization shared by predictor and corrector.
  h_th_.assign(n, Vec3::Zero());
  if (mat.temperature > 0.0) {
    std::normal_distribution<double> n01;
    for (int i = 0; i < n; ++i) {
      const double sigma = thermal_sigma(mat, state.alpha[i], volume, dt);
      h_th_[i] = Vec3(n01(rng), n01(rng), n01(rng)) * sigma;
    }
  }

  m0_ = state.m;
  k1_.resize(n);
  fields(m0_, state, mat, h_eff_);
  for (int i = 0; i < n; ++i) {
    const Vec3& is = has_torque ? torque->spin_current[i] : kNoTorque;
    k1_[i] = llg_rhs(m0_[i], h_eff_[i] + h_th_[i], state.alpha[i], gmu0, is, stt_rate);
    state.m[i] = m0_[i] + dt * k1_[i];
  }

  fields(state.m, state, mat, h_eff_);
  for (int i = 0; i < n; ++i) {
    const Vec3& is = has_torque ? torque->spin_current[i] : kNoTorque;
    const Vec3 k2 = llg_rhs(state.m[i], h_eff_[i] + h_th_[i], state.alpha[i], gmu0, is, stt_rate);
    state.m[i] = (m0_[i] + 0.5 * dt * (k1_[i] + k2)).normalized();
  }
}

WireState llg_step(WireState state, const MaterialFM& mat, const TorqueField& torque, double dt, Rng& rng) {
  LlgIntegrator integrator;
  integrator.step(state, mat, &torque, dt, rng);
  return state;
}

void set_damping_profile(WireState& state, CellRange region, double alpha_end) {
  if (!(alpha_end > 0.0)) throw ConfigError("damping must be positive");
  if (region.begin < 0 || region.end > state.n_cells() || region.begin > region.end) {
    throw InvalidGeometry("damping region outside the wire");
  }
  for (int i = region.begin; i < region.end; ++i) state.alpha[i] = alpha_end;
}

WireState init_wire(int n_cells, double mesh, double width, double thickness, int direction, double alpha) {
  if (n_cells <= 0) throw InvalidGeometry("wire needs at least one cell");
  if (direction != 1 && direction != -1) throw InvalidGeometry("wire direction must be +1 or -1");
  if (!(alpha > 0.0)) throw ConfigError("damping must be positive");
  WireState s;
  s.m.assign(n_cells, Vec3(direction, 0.0, 0.0));
  s.alpha.assign(n_cells, alpha);
  s.mesh = mesh;
  s.width = width;
  s.thickness = thickness;
  return s;
}

double wall_width(const MaterialFM& mat) {
  // In-plane (transverse) wall: the anisotropy it pays is the y-x shape term.
  const double dn = mat.demag.ny - mat.demag.nx;
  if (!(dn > 0.0)) throw ConfigError("wall width needs Ny > Nx");
  return phys::kPi * std::sqrt(2.0 * mat.a_ex / (kMu0 * mat.ms * mat.ms * dn));
}

WireState init_domain_wall(int n_cells, double mesh, double width, double thickness, double alpha,
                           const MaterialFM& mat, double position, int chirality, int left, double tilt) {
  WireState s = init_wire(n_cells, mesh, width, thickness, left, alpha);
  if (!(position > 0.0 && position < s.length())) throw InvalidGeometry("wall position outside the wire");
  if (chirality != 1 && chirality != -1) throw InvalidGeometry("chirality must be +1 or -1");
  const double delta = wall_width(mat) / phys::kPi;
  for (int i = 0; i < n_cells; ++i) {
    const double u = (s.x(i) - position) / delta;
    const double mx = -left * std::tanh(u);
    const double mt = 1.0 / std::cosh(u);
    s.m[i] = Vec3(mx, chirality * mt * std::cos(tilt), mt * std::sin(tilt)).normalized();
  }
  return s;
}

void write_wire_csv(std::ostream& out, const WireState& state) {
  out.precision(17);
  out << "cell,x_m,mx,my,mz,alpha\n";
  for (int i = 0; i < state.n_cells(); ++i) {
    const Vec3& m = state.m[i];
    out << i << ',' << state.x(i) << ',' << m.x() << ',' << m.y() << ',' << m.z() << ',' << state.alpha[i] << '\n';
  }
}

}  // namespace svl::mag
