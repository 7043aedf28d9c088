#pragma once

#include "effres/sgraph.hpp"

namespace effres::effective {

using numerics::Vector;
using sgraph::NodeSetPair;
using sgraph::SignedGraph;

/// Extended effective conductance and its reciprocal. A conductance within
/// the open-circuit tolerance maps to an infinite resistance.
struct EffectiveValue {
  double geff = 0.0;
  double reff = 0.0;
  bool reff_infinite = false;
};

/// Node potentials and injections when V_a is held at unit potential and
/// V_b is grounded (V_c floats). total_current equals the effective
/// conductance between the two sets.
struct BoundaryCircuitSolution {
  Vector potentials;   // per node
  Vector injections;   // per node; zero on V_c
  double total_current = 0.0;
};

/// Current vector of the minimum-energy unit transfer from V_a to V_b and
/// the dissipated energy (equals the effective resistance).
struct MinEnergyCurrent {
  Vector current;  // per node
  double energy = 0.0;
};

/// Extended effective conductance between the two node sets: the quadratic
/// form of the Kron-reduced Laplacian over the aggregated V_a indicator.
/// Throws SingularBlockError when the eliminated block is singular.
EffectiveValue geff(const SignedGraph& g, const NodeSetPair& pair);

/// Same quantity computed directly from a Laplacian (any angle-parameterized
/// or otherwise precomputed matrix).
EffectiveValue geff_of_laplacian(const numerics::SymMatrix& l, const NodeSetPair& pair);

/// Classic pairwise effective resistance/conductance through the Laplacian
/// pseudoinverse. Deliberately skips any definiteness check so the
/// traditional value can be compared against the extended one on signed
/// graphs where only the latter is meaningful.
struct TraditionalValue {
  double resistance = 0.0;
  double conductance = 0.0;
};
TraditionalValue traditional_resistance(const SignedGraph& g, int i, int j);

/// Boundary-value circuit solve behind the current-flow interpretation.
BoundaryCircuitSolution boundary_solve(const SignedGraph& g, const NodeSetPair& pair);

/// Closed-form optimum of the minimum-energy current transfer problem.
/// Requires the Laplacian to be PSD with exactly one zero eigenvalue.
MinEnergyCurrent min_energy_current(const SignedGraph& g, const NodeSetPair& pair);

/// Effective resistance via the clustered-Laplacian potential-difference
/// route. Requires PSD with one zero eigenvalue.
double clustered_reff(const SignedGraph& g, const NodeSetPair& pair);

}  // namespace effres::effective
