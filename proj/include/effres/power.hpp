#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "effres/definiteness.hpp"

namespace effres::power {

using numerics::Inertia;
using numerics::Matrix;
using numerics::SymMatrix;
using numerics::Vector;
using sgraph::NodeSetPair;
using sgraph::SignedGraph;

enum class BusKind { Generator, Load };

/// One bus of the structure-preserving model. Generators carry inertia and
/// a second-order swing state; loads are first-order frequency dependent.
struct Bus {
  BusKind kind = BusKind::Load;
  double v_set = 1.0;    // voltage magnitude, p.u.
  double inertia = 0.0;  // M, generators only, > 0
  double damping = 1.0;  // D, > 0 for every bus
  double power = 0.0;    // active injection, p.u.
};

/// One purely inductive line; the susceptance of the line is -b, b > 0.
struct Line {
  int from;
  int to;
  double b;
};

class PowerNetwork {
 public:
  PowerNetwork(std::vector<Bus> buses, std::vector<Line> lines);

  int bus_count() const { return static_cast<int>(buses_.size()); }
  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Line>& lines() const { return lines_; }

  std::vector<int> generator_buses() const;
  std::vector<int> load_buses() const;

  /// Throws when the injections do not balance to ΣP = 0 within 1e-9.
  void require_balanced(const char* who) const;

  /// Network with the same buses/lines but replaced injections.
  PowerNetwork with_injections(const Vector& p) const;

 private:
  std::vector<Bus> buses_;
  std::vector<Line> lines_;
};

/// Angle vector (radians) pinned to zero at the reference bus.
struct Equilibrium {
  Vector theta;
  int reference_bus = 0;
};

/// Per-bus active power mismatch P_i - sum_j V_i V_j B_ij sin(theta_ij).
Vector power_mismatch(const PowerNetwork& net, const Vector& theta);

/// Newton power flow on the reduced mismatch with step-halving damping.
/// Converges to the equilibrium nearest the initial guess; high-angle
/// equilibria are reached by seeding near them. Reference: highest bus.
Equilibrium power_flow_solve(const PowerNetwork& net, const Vector& theta0,
                             double tol = 1e-10, int max_iter = 50);

/// Graph with weight V_i V_j B_ij cos(theta_i - theta_j) on every line.
/// Accepts any angle vector, equilibrium or not.
SignedGraph active_power_flow_graph(const PowerNetwork& net, const Vector& theta);

/// Lines whose angle difference lies in (90, 270) degrees mod 360 --
/// exactly the negative-weight edges of the active power flow graph.
std::vector<std::pair<int, int>> critical_lines(const PowerNetwork& net,
                                                const Vector& theta);

/// State matrix of the linearized structure-preserving model, reference at
/// the highest bus (which must be a load). When include_generator_damping
/// is false the generator damping block is dropped, matching the
/// damping-excluded convention used for the reported unstable eigenvalues;
/// load damping always stays (the model needs it to be well posed).
Matrix jacobian_dyn(const PowerNetwork& net, const Equilibrium& eq,
                    bool include_generator_damping = true);

/// Inertia of a general (nonsymmetric) state matrix by real part of its
/// eigenvalues, with |Re| <= tol counted as zero.
Inertia spectrum_inertia(const Matrix& state, double tol = 1e-7);

enum class StabilityClass { NonHyperbolic, StableHyperbolic, UnstableType };

struct EquilibriumClass {
  StabilityClass variant = StabilityClass::NonHyperbolic;
  int type_m = 0;  // unstable manifold count when UnstableType
  Inertia jdyn_inertia;
  Inertia laplacian_inertia;
  std::vector<std::pair<int, int>> critical;
};

/// Classifies an equilibrium: hyperbolicity from the reduced Laplacian F,
/// stability from the definiteness of the flow-graph Laplacian, with both
/// spectral audits attached.
EquilibriumClass classify(const PowerNetwork& net, const Equilibrium& eq);

/// Effective conductance of the active power flow graph for a bus-set
/// pair; negative values flag electrical antagonism between the sets.
double stability_indicator(const PowerNetwork& net, const Equilibrium& eq,
                           const NodeSetPair& pair);

/// Coherency feedback coefficient (1/m_a + 1/m_b) * geff for two groups of
/// generator buses; the restoring strength of the reduced two-machine
/// swing, negative at separation-prone operating points.
double coherent_swing(const PowerNetwork& net, const Equilibrium& eq,
                      const NodeSetPair& gen_pair);

}  // namespace effres::power
