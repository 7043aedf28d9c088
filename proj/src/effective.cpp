#include "effres/effective.hpp"

#include <cmath>

#include "effres/errors.hpp"

namespace effres::effective {

using numerics::Matrix;
using numerics::SymMatrix;

namespace {

EffectiveValue from_geff(double g, double lap_norm) {
  EffectiveValue out;
  out.geff = g;
  if (std::abs(g) <= 1e-10 * std::max(1.0, lap_norm)) {
    out.reff_infinite = true;
    out.reff = std::numeric_limits<double>::infinity();
  } else {
    out.reff = 1.0 / g;
  }
  return out;
}

void require_psd_one_zero(const SymMatrix& l, const char* who) {
  const numerics::Inertia in = numerics::inertia(l);
  if (in.n_minus != 0 || in.n_zero != 1) {
    throw NotPsdOneZeroError(std::string(who) +
                             ": Laplacian is not PSD with exactly one zero eigenvalue");
  }
}

// Submatrix helper for Laplacian blocks.
Matrix block(const SymMatrix& l, const std::vector<int>& rows,
             const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = l(rows[i], cols[j]);
  }
  return out;
}

}  // namespace

EffectiveValue geff_of_laplacian(const SymMatrix& l, const NodeSetPair& pair) {
  if (pair.node_count() != l.order()) {
    throw InvalidPairError("geff: pair does not match Laplacian order");
  }
  std::vector<int> keep = pair.set_a();
  keep.insert(keep.end(), pair.set_b().begin(), pair.set_b().end());
  SymMatrix reduced = [&] {
    if (pair.set_c().empty()) {
      return SymMatrix(block(l, keep, keep));
    }
    try {
      return numerics::schur_complement(l, keep);
    } catch (const SingularBlockError&) {
      throw SingularBlockError(
          "geff: L_cc is singular; extended effective conductance undefined "
          "for this pair (nonsingular-block assumption violated)");
    }
  }();
  const int a = static_cast<int>(pair.set_a().size());
  double g = 0.0;
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < a; ++j) g += reduced(i, j);
  }
  const double lap_norm = l.mat().cwiseAbs().maxCoeff();
  return from_geff(g, lap_norm);
}

EffectiveValue geff(const SignedGraph& g, const NodeSetPair& pair) {
  g.require_connected("geff");
  return geff_of_laplacian(sgraph::laplacian(g), pair);
}

TraditionalValue traditional_resistance(const SignedGraph& g, int i, int j) {
  g.require_connected("traditional_resistance");
  if (i == j || i < 0 || j < 0 || i >= g.node_count() || j >= g.node_count()) {
    throw InvalidPairError("traditional_resistance: need two distinct nodes");
  }
  const SymMatrix dag = numerics::pseudo_inverse(sgraph::laplacian(g), 1e-12);
  const double r = dag(i, i) - dag(i, j) - dag(j, i) + dag(j, j);
  TraditionalValue out;
  out.resistance = r;
  out.conductance = 1.0 / r;
  return out;
}

BoundaryCircuitSolution boundary_solve(const SignedGraph& g, const NodeSetPair& pair) {
  g.require_connected("boundary_solve");
  const SymMatrix l = sgraph::laplacian(g);
  const int n = g.node_count();

  Vector v = Vector::Zero(n);
  for (int i : pair.set_a()) v[i] = 1.0;
  if (!pair.set_c().empty()) {
    // Third block row of the boundary circuit equation:
    //   L_ac^T 1_a + L_bc^T 0 + L_cc v_c = 0.
    const Matrix lcc = block(l, pair.set_c(), pair.set_c());
    const Matrix lac = block(l, pair.set_a(), pair.set_c());
    Vector rhs = -lac.transpose() * Vector::Ones(pair.set_a().size());
    Matrix vc = [&] {
      try {
        return numerics::solve_sym(SymMatrix(lcc), Matrix(rhs));
      } catch (const SingularBlockError&) {
        throw SingularBlockError("boundary_solve: L_cc is singular");
      }
    }();
    for (size_t k = 0; k < pair.set_c().size(); ++k) v[pair.set_c()[k]] = vc(k, 0);
  }

  BoundaryCircuitSolution out;
  out.potentials = v;
  out.injections = l.mat() * v;
  out.total_current = 0.0;
  for (int i : pair.set_a()) out.total_current += out.injections[i];
  return out;
}

MinEnergyCurrent min_energy_current(const SignedGraph& g, const NodeSetPair& pair) {
  g.require_connected("min_energy_current");
  const SymMatrix l = sgraph::laplacian(g);
  require_psd_one_zero(l, "min_energy_current");

  const auto& va = pair.set_a();
  const auto& vb = pair.set_b();
  const auto& vc = pair.set_c();
  const Vector ones_a = Vector::Ones(va.size());

  // Closed-form optimum: the current vector is reff * [(L_aa - L_ac
  // L_cc^-1 L_ac^T) 1_a ; (L_ab^T - L_bc L_cc^-1 L_ac^T) 1_a ; 0_c],
  // i.e. the first block column of the Kron-reduced Laplacian aggregated
  // over V_a, rescaled to unit total injection.
  Vector ia, ib;
  if (vc.empty()) {
    ia = block(l, va, va) * ones_a;
    ib = block(l, va, vb).transpose() * ones_a;
  } else {
    const Matrix lcc = block(l, vc, vc);
    const Matrix lac = block(l, va, vc);
    const Matrix lbc = block(l, vb, vc);
    const Matrix x = numerics::solve_sym(SymMatrix(lcc), Matrix(lac.transpose() * ones_a));
    ia = block(l, va, va) * ones_a - lac * x;
    ib = block(l, va, vb).transpose() * ones_a - lbc * x;
  }

  const double gval = ia.sum();
  if (std::abs(gval) <= 1e-14) {
    throw SingularBlockError("min_energy_current: zero effective conductance");
  }
  const double reff = 1.0 / gval;

  Vector current = Vector::Zero(g.node_count());
  for (size_t k = 0; k < va.size(); ++k) current[va[k]] = reff * ia[k];
  for (size_t k = 0; k < vb.size(); ++k) current[vb[k]] = reff * ib[k];

  const SymMatrix dag = numerics::pseudo_inverse(l, 1e-12);
  MinEnergyCurrent out;
  out.current = current;
  out.energy = current.dot(dag.mat() * current);
  return out;
}

double clustered_reff(const SignedGraph& g, const NodeSetPair& pair) {
  g.require_connected("clustered_reff");
  require_psd_one_zero(sgraph::laplacian(g), "clustered_reff");
  const SymMatrix clustered = sgraph::cluster_laplacian(g, pair);
  const SymMatrix dag = numerics::pseudo_inverse(clustered, 1e-12);
  return dag(0, 0) - dag(0, 1) - dag(1, 0) + dag(1, 1);
}

}  // namespace effres::effective
