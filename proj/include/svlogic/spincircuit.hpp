#pragma once

// Four-component (charge + spin x/y/z) nodal analysis.
//
// Every circuit element is a 4x4 conductance block. Magnetic elements are built
// in a local frame (charge, m, t1, t2) and rotated into the global (charge, sx,
// sy, sz) frame with rotate_to_global(). Currents follow the conventional
// direction: a branch current is G (V_i - V_j) flowing from node_i to node_j.

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svl::circuit {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

inline constexpr int kGround = -1;

/// 4x4 conductance in siemens. Basis order is (charge, sx, sy, sz) in the global
/// frame, (charge, m_parallel, t1, t2) in a magnet's local frame.
struct Conductance4 {
  Mat4 g = Mat4::Zero();

  static Conductance4 diagonal(double charge, double spin) {
    Conductance4 c;
    c.g.diagonal() << charge, spin, spin, spin;
    return c;
  }
  double charge() const { return g(0, 0); }
  bool is_diagonal() const { return (g - Mat4(g.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0; }
};

/// Series block plus the shunt block hung at each end (or at the NM side only,
/// for interfaces).
struct PiModel {
  Conductance4 series;
  Conductance4 shunt;
};

struct InterfaceParams {
  double g_up = 0.9e15;    // S/m^2
  double g_down = 0.1e15;  // S/m^2
  double g_mix = 0.39e15;  // S/m^2, real part
  double g_mix_imag = 0.0; // S/m^2, field-like part
  double mix_factor = 1.0; // 2 for the Re(2 G_mix) convention
};

/// Normal-metal segment, standard pi-model of the spin diffusion equation.
PiModel nm_conductances(double length, double area, double resistivity, double spin_diffusion_length);

/// Ferromagnet segment in the local frame. Transverse spin is fully absorbed:
/// the series transverse entries are zero and the shunts carry the absorption.
PiModel fm_conductances(double length, double area, double resistivity, double beta, double lsf_parallel,
                        double lsf_perp);

/// FM/NM interface in the local frame. The returned shunt belongs on the NM side;
/// the current it carries is the transverse spin current absorbed by the magnet.
PiModel interface_conductances(double area, const InterfaceParams& p);

/// Orthonormal local frame (m, t1, t2) as the columns of a rotation matrix.
/// For m = +x the frame is the identity.
Eigen::Matrix3d local_frame(const Vec3& m_hat);

Conductance4 rotate_to_global(const Conductance4& local, const Vec3& m_hat);

enum class BranchKind { Series, Shunt };

/// Wire/cell whose magnetization orients a branch.
struct CellRef {
  int wire = 0;
  int cell = 0;
  bool operator==(const CellRef&) const = default;
};

struct Branch {
  int node_i = 0;
  int node_j = kGround;
  BranchKind kind = BranchKind::Series;
  Conductance4 conductance;             // global frame, what gets stamped
  Conductance4 local;                   // local frame, only meaningful with `magnetization`
  std::optional<CellRef> magnetization;
};

struct CurrentSource {
  int node = 0;
  double amplitude = 0.0;  // A of charge current injected into `node`
};

class CircuitGraph {
 public:
  int add_node(std::string label);
  int add_series(int i, int j, const Conductance4& g);
  int add_shunt(int i, const Conductance4& g);
  /// Magnetic branch: `local` is rotated by the magnetization of `cell` on refresh.
  int add_magnetic(int i, int j, BranchKind kind, const Conductance4& local, CellRef cell, const Vec3& m_hat);
  int add_current_source(int node, double amplitude);

  /// Re-rotate every magnetic branch. `m_of` maps a CellRef to its unit vector.
  template <typename F>
  void refresh(F&& m_of) {
    for (auto& b : branches_) {
      if (b.magnetization) b.conductance = rotate_to_global(b.local, m_of(*b.magnetization));
    }
  }

  int node_count() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int node) const { return labels_.at(node); }
  const std::vector<Branch>& branches() const { return branches_; }
  std::vector<Branch>& branches() { return branches_; }
  const std::vector<CurrentSource>& sources() const { return sources_; }
  std::vector<CurrentSource>& sources() { return sources_; }

  /// Structural checks: valid endpoints, shunts to ground, at least one ground
  /// connection. Throws InvalidGeometry.
  void validate() const;

  /// Nodes not connected to ground through any branch carrying charge.
  std::vector<int> charge_floating_nodes() const;

 private:
  std::vector<std::string> labels_;
  std::vector<Branch> branches_;
  std::vector<CurrentSource> sources_;
};

/// Dense [G] and [I] of the 4N x 4N nodal system. Ground is not a row.
struct NodalSystem {
  Eigen::MatrixXd g;
  Eigen::VectorXd i;
};

NodalSystem assemble(const CircuitGraph& graph);

struct SolveResult {
  std::vector<Vec4> node_voltages;
  std::vector<Vec4> branch_currents;
};

enum class SolveMethod {
  Dense,          // LU with partial pivoting on the full 4N system
  LeafCondensed,  // eliminate tree-like leaves block-wise, dense LU on what is left
};

/// Dense direct solve of an assembled system; branch currents from the graph.
SolveResult solve(const CircuitGraph& graph, const NodalSystem& system);

SolveResult solve(const CircuitGraph& graph, SolveMethod method = SolveMethod::LeafCondensed);

/// Net 4-component current leaving each node through its branches minus the
/// injected source current. Zero for an exact solution.
std::vector<Vec4> kcl_residual(const CircuitGraph& graph, const SolveResult& result);

/// Spin current absorbed through each transverse interface shunt, projected
/// perpendicular to the cell magnetization. Sign follows the electron spin
/// flow into the magnet: a component along s pushes m toward s.
std::vector<Vec3> stt_at_contact(const SolveResult& result, std::span<const int> shunt_branches,
                                 std::span<const Vec3> m_hat);

/// Row-major CSV with a header naming basis components.
void write_conductance_csv(std::ostream& out, const Conductance4& c);
void write_solution_csv(std::ostream& out, const CircuitGraph& graph, const SolveResult& result);

}  // namespace svl::circuit
