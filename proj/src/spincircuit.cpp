#include "svlogic/spincircuit.hpp"

#include "svlogic/errors.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <ostream>
#include <sstream>

namespace svl::circuit {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidGeometry(std::string(name) + " must be positive and finite");
  }
}

// Spin part of a pi-model for diffusion with conductance scale g0 = A/(rho*lambda).
struct SpinPi {
  double series;
  double shunt;
};

SpinPi spin_pi(double g0, double length, double lambda) {
  const double r = length / lambda;
  // sinh overflows past ~710; the series element is zero there to double precision.
  const double series = r > 700.0 ? 0.0 : g0 / std::sinh(r);
  return {series, g0 * std::tanh(0.5 * r)};
}

}  // namespace

PiModel nm_conductances(double length, double area, double resistivity, double spin_diffusion_length) {
  require_positive(length, "length");
  require_positive(area, "area");
  require_positive(resistivity, "resistivity");
  require_positive(spin_diffusion_length, "spin diffusion length");

  const double charge = area / (resistivity * length);
  const SpinPi s = spin_pi(area / (resistivity * spin_diffusion_length), length, spin_diffusion_length);

  PiModel pi;
  pi.series = Conductance4::diagonal(charge, s.series);
  pi.shunt = Conductance4::diagonal(0.0, s.shunt);
  return pi;
}

PiModel fm_conductances(double length, double area, double resistivity, double beta, double lsf_parallel,
                        double lsf_perp) {
  require_positive(length, "length");
  require_positive(area, "area");
  require_positive(resistivity, "resistivity");
  require_positive(lsf_parallel, "longitudinal spin relaxation length");
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw UnphysicalPolarization("conductivity polarization beta must lie in [0, 1), got " + std::to_string(beta));
  }

  const double g = area / (resistivity * length);
  // The spin current in excess of beta*I_charge diffuses with conductivity (1-beta^2)/rho.
  const SpinPi lon = spin_pi((1.0 - beta * beta) * area / (resistivity * lsf_parallel), length, lsf_parallel);

  PiModel pi;
  pi.series.g(0, 0) = g;
  pi.series.g(0, 1) = beta * g;
  pi.series.g(1, 0) = beta * g;
  pi.series.g(1, 1) = beta * beta * g + lon.series;
  pi.shunt.g(1, 1) = lon.shunt;

  // Transverse spin never crosses a cell: series stays zero and the shunt absorbs.
  double transverse_shunt = 0.0;
  if (lsf_perp > 0.0) {
    const double g0 = area / (resistivity * lsf_perp);
    transverse_shunt = g0 * std::tanh(0.5 * length / lsf_perp);
  } else {
    transverse_shunt = 1e3 * g;  // ideal absorber
  }
  pi.shunt.g(2, 2) = transverse_shunt;
  pi.shunt.g(3, 3) = transverse_shunt;
  return pi;
}

PiModel interface_conductances(double area, const InterfaceParams& p) {
  require_positive(area, "area");
  require_positive(p.g_up, "majority interface conductance");
  require_positive(p.g_down, "minority interface conductance");
  require_positive(p.g_mix, "mixing interface conductance");

  const double g = (p.g_up + p.g_down) * area;
  const double pol = (p.g_up - p.g_down) / (p.g_up + p.g_down);

  PiModel pi;
  pi.series.g(0, 0) = g;
  pi.series.g(0, 1) = pol * g;
  pi.series.g(1, 0) = pol * g;
  pi.series.g(1, 1) = g;

  const double re = p.mix_factor * p.g_mix * area;
  const double im = p.mix_factor * p.g_mix_imag * area;
  pi.shunt.g(2, 2) = re;
  pi.shunt.g(3, 3) = re;
  pi.shunt.g(2, 3) = -im;
  pi.shunt.g(3, 2) = im;
  return pi;
}

Eigen::Matrix3d local_frame(const Vec3& m_hat) {
  const double n = m_hat.norm();
  if (!(std::abs(n - 1.0) <= 1e-9)) {
    std::ostringstream os;
    os << "magnetization must be a unit vector, |m| = " << n;
    throw NormalizationError(os.str());
  }
  // t1 = z x m unless m is close to z, then fall back to m x x.
  Vec3 t1 = std::abs(m_hat.z()) < 0.9 ? Vec3::UnitZ().cross(m_hat) : m_hat.cross(Vec3::UnitX());
  t1.normalize();
  const Vec3 t2 = m_hat.cross(t1);
  Eigen::Matrix3d r;
  r.col(0) = m_hat;
  r.col(1) = t1;
  r.col(2) = t2;
  return r;
}

Conductance4 rotate_to_global(const Conductance4& local, const Vec3& m_hat) {
  Mat4 r = Mat4::Identity();
  r.bottomRightCorner<3, 3>() = local_frame(m_hat);
  Conductance4 out;
  out.g.noalias() = r * local.g * r.transpose();
  // Keep the charge-charge entry bit-exact.
  out.g(0, 0) = local.g(0, 0);
  return out;
}

// ---------------------------------------------------------------------------
// CircuitGraph

int CircuitGraph::add_node(std::string label) {
  labels_.push_back(std::move(label));
  return static_cast<int>(labels_.size()) - 1;
}

int CircuitGraph::add_series(int i, int j, const Conductance4& g) {
  branches_.push_back(Branch{i, j, BranchKind::Series, g, g, std::nullopt});
  return static_cast<int>(branches_.size()) - 1;
}

int CircuitGraph::add_shunt(int i, const Conductance4& g) {
  branches_.push_back(Branch{i, kGround, BranchKind::Shunt, g, g, std::nullopt});
  return static_cast<int>(branches_.size()) - 1;
}

int CircuitGraph::add_magnetic(int i, int j, BranchKind kind, const Conductance4& local, CellRef cell,
                               const Vec3& m_hat) {
  if (kind == BranchKind::Shunt) j = kGround;
  branches_.push_back(Branch{i, j, kind, rotate_to_global(local, m_hat), local, cell});
  return static_cast<int>(branches_.size()) - 1;
}

int CircuitGraph::add_current_source(int node, double amplitude) {
  sources_.push_back(CurrentSource{node, amplitude});
  return static_cast<int>(sources_.size()) - 1;
}

void CircuitGraph::validate() const {
  const int n = node_count();
  auto valid = [n](int k) { return k >= 0 && k < n; };
  bool grounded = false;
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    const auto& br = branches_[b];
    if (!valid(br.node_i)) throw InvalidGeometry("branch " + std::to_string(b) + " has an invalid first node");
    if (br.kind == BranchKind::Shunt && br.node_j != kGround) {
      throw InvalidGeometry("shunt branch " + std::to_string(b) + " must terminate at ground");
    }
    if (br.node_j != kGround && !valid(br.node_j)) {
      throw InvalidGeometry("branch " + std::to_string(b) + " has an invalid second node");
    }
    if (br.node_j == kGround) grounded = true;
    if (!br.conductance.g.allFinite()) throw InvalidGeometry("branch " + std::to_string(b) + " is not finite");
  }
  for (const auto& s : sources_) {
    if (!valid(s.node)) throw InvalidGeometry("current source attached to an invalid node");
  }
  if (!grounded) throw InvalidGeometry("circuit has no ground reference");
}

std::vector<int> CircuitGraph::charge_floating_nodes() const {
  const int n = node_count();
  std::vector<std::vector<int>> adj(n);
  std::vector<char> reached(n, 0);
  std::deque<int> queue;
  for (const auto& b : branches_) {
    if (b.conductance.charge() == 0.0) continue;
    if (b.node_j == kGround) {
      if (!reached[b.node_i]) queue.push_back(b.node_i);
      reached[b.node_i] = 1;
    } else {
      adj[b.node_i].push_back(b.node_j);
      adj[b.node_j].push_back(b.node_i);
    }
  }
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    for (int nb : adj[k]) {
      if (!reached[nb]) {
        reached[nb] = 1;
        queue.push_back(nb);
      }
    }
  }
  std::vector<int> floating;
  for (int k = 0; k < n; ++k) {
    if (!reached[k]) floating.push_back(k);
  }
  return floating;
}

// ---------------------------------------------------------------------------
// Assembly and solution

namespace {

void throw_if_floating(const CircuitGraph& graph) {
  const auto floating = graph.charge_floating_nodes();
  if (floating.empty()) return;
  std::ostringstream os;
  os << "singular circuit: floating node set {";
  for (std::size_t k = 0; k < floating.size(); ++k) {
    os << (k ? ", " : "") << graph.label(floating[k]);
    if (k == 15 && floating.size() > 16) {
      os << ", ... (" << floating.size() << " nodes)";
      break;
    }
  }
  os << "}";
  throw SingularCircuit(os.str());
}

std::vector<Vec4> branch_currents(const CircuitGraph& graph, const std::vector<Vec4>& v) {
  std::vector<Vec4> out;
  out.reserve(graph.branches().size());
  for (const auto& b : graph.branches()) {
    Vec4 dv = v[b.node_i];
    if (b.node_j != kGround) dv -= v[b.node_j];
    out.push_back(b.conductance.g * dv);
  }
  return out;
}

}  // namespace

NodalSystem assemble(const CircuitGraph& graph) {
  graph.validate();
  const int n = graph.node_count();
  NodalSystem sys;
  sys.g = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  sys.i = Eigen::VectorXd::Zero(4 * n);
  for (const auto& b : graph.branches()) {
    const Mat4& g = b.conductance.g;
    const int i = 4 * b.node_i;
    sys.g.block<4, 4>(i, i) += g;
    if (b.kind == BranchKind::Series && b.node_j != kGround) {
      const int j = 4 * b.node_j;
      sys.g.block<4, 4>(j, j) += g;
      sys.g.block<4, 4>(i, j) -= g;
      sys.g.block<4, 4>(j, i) -= g;
    }
  }
  for (const auto& s : graph.sources()) sys.i(4 * s.node) += s.amplitude;
  return sys;
}

SolveResult solve(const CircuitGraph& graph, const NodalSystem& system) {
  throw_if_floating(graph);
  const int n = graph.node_count();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.g);
  if (lu.rcond() < 1e-14) throw SingularCircuit("singular circuit: nodal matrix is rank deficient");
  const Eigen::VectorXd x = lu.solve(system.i);

  SolveResult r;
  r.node_voltages.resize(n);
  for (int k = 0; k < n; ++k) r.node_voltages[k] = x.segment<4>(4 * k);
  r.branch_currents = branch_currents(graph, r.node_voltages);
  return r;
}

namespace {

// Block-sparse copy of the nodal system. Rows are keyed by node; off-diagonal
// blocks live in `row[i][j]`.
struct BlockSystem {
  std::vector<Mat4> diag;
  std::vector<std::map<int, Mat4>> row;
  std::vector<Vec4> rhs;
};

BlockSystem block_assemble(const CircuitGraph& graph) {
  const int n = graph.node_count();
  BlockSystem s{std::vector<Mat4>(n, Mat4::Zero()), std::vector<std::map<int, Mat4>>(n),
                std::vector<Vec4>(n, Vec4::Zero())};
  for (const auto& b : graph.branches()) {
    const Mat4& g = b.conductance.g;
    s.diag[b.node_i] += g;
    if (b.kind == BranchKind::Series && b.node_j != kGround) {
      s.diag[b.node_j] += g;
      auto [ij, new_ij] = s.row[b.node_i].try_emplace(b.node_j, Mat4::Zero());
      ij->second -= g;
      auto [ji, new_ji] = s.row[b.node_j].try_emplace(b.node_i, Mat4::Zero());
      ji->second -= g;
    }
  }
  for (const auto& src : graph.sources()) s.rhs[src.node](0) += src.amplitude;
  return s;
}

struct Eliminated {
  int node;
  int neighbor;     // kGround when the node was isolated
  Mat4 inv_diag;
  Mat4 coupling;    // row[node][neighbor]
  Vec4 rhs;
};

}  // namespace

namespace {

SolveResult solve_leaf_condensed(const CircuitGraph& graph) {
  graph.validate();
  throw_if_floating(graph);
  const int n = graph.node_count();
  BlockSystem s = block_assemble(graph);

  std::vector<char> gone(n, 0);
  std::vector<Eliminated> order;
  order.reserve(n);
  std::deque<int> leaves;
  for (int k = 0; k < n; ++k) {
    if (s.row[k].size() <= 1) leaves.push_back(k);
  }

  while (!leaves.empty()) {
    const int v = leaves.front();
    leaves.pop_front();
    if (gone[v] || s.row[v].size() > 1) continue;

    Eigen::FullPivLU<Mat4> lu(s.diag[v]);
    if (!lu.isInvertible()) {
      throw SingularCircuit("singular circuit: node " + graph.label(v) + " has a singular self-conductance");
    }
    Eliminated e{v, kGround, lu.inverse(), Mat4::Zero(), s.rhs[v]};
    if (!s.row[v].empty()) {
      const int u = s.row[v].begin()->first;
      e.neighbor = u;
      e.coupling = s.row[v].begin()->second;
      const Mat4 g_uv = s.row[u].at(v);
      const Mat4 schur = g_uv * e.inv_diag;
      s.diag[u].noalias() -= schur * e.coupling;
      s.rhs[u].noalias() -= schur * e.rhs;
      s.row[u].erase(v);
      if (s.row[u].size() <= 1) leaves.push_back(u);
    }
    gone[v] = 1;
    order.push_back(e);
  }

  std::vector<Vec4> v(n, Vec4::Zero());

  // Dense LU on the part of the graph that contains loops.
  std::vector<int> core;
  std::vector<int> slot(n, -1);
  for (int k = 0; k < n; ++k) {
    if (!gone[k]) {
      slot[k] = static_cast<int>(core.size());
      core.push_back(k);
    }
  }
  if (!core.empty()) {
    const int m = static_cast<int>(core.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4 * m, 4 * m);
    Eigen::VectorXd rhs(4 * m);
    for (int a = 0; a < m; ++a) {
      const int k = core[a];
      g.block<4, 4>(4 * a, 4 * a) = s.diag[k];
      rhs.segment<4>(4 * a) = s.rhs[k];
      for (const auto& [j, blk] : s.row[k]) g.block<4, 4>(4 * a, 4 * slot[j]) = blk;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
    if (lu.rcond() < 1e-14) throw SingularCircuit("singular circuit: condensed nodal matrix is rank deficient");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (int a = 0; a < m; ++a) v[core[a]] = x.segment<4>(4 * a);
  }

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Vec4 r = it->rhs;
    if (it->neighbor != kGround) r.noalias() -= it->coupling * v[it->neighbor];
    v[it->node].noalias() = it->inv_diag * r;
  }

  SolveResult out;
  out.node_voltages = std::move(v);
  out.branch_currents = branch_currents(graph, out.node_voltages);
  return out;
}

}  // namespace

SolveResult solve(const CircuitGraph& graph, SolveMethod method) {
  if (method == SolveMethod::Dense) return solve(graph, assemble(graph));
  return solve_leaf_condensed(graph);
}

std::vector<Vec4> kcl_residual(const CircuitGraph& graph, const SolveResult& result) {
  std::vector<Vec4> res(graph.node_count(), Vec4::Zero());
  const auto& branches = graph.branches();
  for (std::size_t b = 0; b < branches.size(); ++b) {
    res[branches[b].node_i] += result.branch_currents[b];
    if (branches[b].node_j != kGround) res[branches[b].node_j] -= result.branch_currents[b];
  }
  for (const auto& s : graph.sources()) res[s.node](0) -= s.amplitude;
  return res;
}

std::vector<Vec3> stt_at_contact(const SolveResult& result, std::span<const int> shunt_branches,
                                 std::span<const Vec3> m_hat) {
  std::vector<Vec3> out;
  out.reserve(shunt_branches.size());
  for (std::size_t k = 0; k < shunt_branches.size(); ++k) {
    const Vec3 absorbed = result.branch_currents.at(shunt_branches[k]).tail<3>();
    const Vec3& m = m_hat[k];
    // Conventional spin current -> electron spin flow, then drop the part along m.
    Vec3 is = -absorbed;
    is -= m.dot(is) * m;
    out.push_back(is);
  }
  return out;
}

void write_conductance_csv(std::ostream& out, const Conductance4& c) {
  out << "row,charge,sx,sy,sz\n";
  static const char* names[] = {"charge", "sx", "sy", "sz"};
  out.precision(17);
  for (int r = 0; r < 4; ++r) {
    out << names[r];
    for (int col = 0; col < 4; ++col) out << ',' << c.g(r, col);
    out << '\n';
  }
}

void write_solution_csv(std::ostream& out, const CircuitGraph& graph, const SolveResult& result) {
  out.precision(17);
  out << "kind,index,label,charge,sx,sy,sz\n";
  for (int k = 0; k < graph.node_count(); ++k) {
    const Vec4& v = result.node_voltages[k];
    out << "node," << k << ',' << graph.label(k) << ',' << v(0) << ',' << v(1) << ',' << v(2) << ',' << v(3) << '\n';
  }
  for (std::size_t b = 0; b < result.branch_currents.size(); ++b) {
    const Vec4& i = result.branch_currents[b];
    const auto& br = graph.branches()[b];
    out << "branch," << b << ',' << graph.label(br.node_i) << "->"
        << (br.node_j == kGround ? std::string("gnd") : graph.label(br.node_j)) << ',' << i(0) << ',' << i(1) << ','
        << i(2) << ',' << i(3) << '\n';
  }
}

}  // namespace svl::circuit
