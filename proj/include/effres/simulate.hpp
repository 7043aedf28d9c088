#pragma once

#include <iosfwd>

#include "effres/power.hpp"

namespace effres::simulate {

using numerics::Vector;
using power::Equilibrium;
using power::PowerNetwork;

/// Self-cleared fault at one bus: the run starts at the equilibrium with
/// the fault already applied, the fault holds for t_clear seconds, then
/// the pre-fault network is restored. During fault-on the bus carries an
/// extra constant drain V^2 / ground_resistance.
struct FaultScenario {
  int bus = 0;
  double ground_resistance = 0.02;  // p.u., > 0
  double t_clear = 0.0;             // seconds, >= 0
};

enum class Verdict { Stable, Unstable, Diverged };

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> theta;    // per sample, all buses (rad)
  std::vector<Vector> omega_g;  // per sample, generator buses (rad/s)
  Verdict verdict = Verdict::Stable;
};

struct SimOptions {
  double t_end = 5.0;
  double dt = 1e-3;
  /// Test hook for conservative-system checks; requires an all-generator
  /// network since loads need damping to stay well posed.
  bool zero_damping = false;
};

/// Fixed-step RK4 integration of the structure-preserving swing dynamics.
/// Verdict: stable when the largest pairwise generator angle spread over
/// the trailing 20% of the run stays below pi; angle magnitudes beyond
/// 1e4 rad mark the run diverged (flag, not an exception).
Trajectory simulate(const PowerNetwork& net, const Equilibrium& eq,
                    const FaultScenario& fault, const SimOptions& opts = {});

/// Largest stable clearing time by bisection over [0, t_max] at the given
/// resolution. Returns 0 immediately when the starting point classifies
/// unstable or non-hyperbolic -- an equilibrium that cannot hold itself
/// has no clearing margin to search for.
double cct_search(const PowerNetwork& net, const Equilibrium& eq,
                  const FaultScenario& fault_template, double t_max = 2.0,
                  double tol = 0.01, const SimOptions& opts = {.t_end = 20.0});

/// CSV export: t, per-bus angles in degrees, generator speeds in rad/s and
/// the run verdict, six significant digits.
void write_trajectory_csv(std::ostream& os, const PowerNetwork& net,
                          const Trajectory& traj);

/// Total energy of the undamped system: 0.5 w^T M w - sum V_i V_j B_ij
/// cos(theta_ij). Conserved along zero-damping zero-injection trajectories.
double swing_energy(const PowerNetwork& net, const Vector& theta, const Vector& omega_g);

}  // namespace effres::simulate
