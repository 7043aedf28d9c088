#include "effres/power.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "effres/errors.hpp"

namespace effres::power {

PowerNetwork::PowerNetwork(std::vector<Bus> buses, std::vector<Line> lines)
    : buses_(std::move(buses)), lines_(std::move(lines)) {
  if (buses_.empty()) throw GraphError("PowerNetwork: no buses");
  for (const Bus& b : buses_) {
    if (b.kind == BusKind::Generator && !(b.inertia > 0.0)) {
      throw GraphError("PowerNetwork: generator bus needs M > 0");
    }
    if (!(b.damping > 0.0)) throw GraphError("PowerNetwork: every bus needs D > 0");
    if (!(b.v_set > 0.0)) throw GraphError("PowerNetwork: V_set must be positive");
  }
  std::vector<sgraph::Edge> topo;
  for (Line& l : lines_) {
    if (l.from > l.to) std::swap(l.from, l.to);
    if (!(l.b > 0.0)) throw GraphError("PowerNetwork: line susceptance B must be > 0");
    topo.push_back({l.from, l.to, l.b});
  }
  // Reuse the graph validation (range, duplicates, self loops, connectivity).
  sgraph::SignedGraph g(bus_count(), topo);
  g.require_connected("PowerNetwork");
}

std::vector<int> PowerNetwork::generator_buses() const {
  std::vector<int> out;
  for (int i = 0; i < bus_count(); ++i) {
    if (buses_[i].kind == BusKind::Generator) out.push_back(i);
  }
  return out;
}

std::vector<int> PowerNetwork::load_buses() const {
  std::vector<int> out;
  for (int i = 0; i < bus_count(); ++i) {
    if (buses_[i].kind == BusKind::Load) out.push_back(i);
  }
  return out;
}

void PowerNetwork::require_balanced(const char* who) const {
  double sum = 0.0;
  for (const Bus& b : buses_) sum += b.power;
  if (std::abs(sum) > 1e-9) {
    throw GraphError(std::string(who) + ": injections do not balance (sum P != 0)");
  }
}

PowerNetwork PowerNetwork::with_injections(const Vector& p) const {
  if (p.size() != bus_count()) {
    throw GraphError("with_injections: wrong vector length");
  }
  std::vector<Bus> buses = buses_;
  for (int i = 0; i < bus_count(); ++i) buses[i].power = p[i];
  return PowerNetwork(std::move(buses), lines_);
}

Vector power_mismatch(const PowerNetwork& net, const Vector& theta) {
  Vector m(net.bus_count());
  for (int i = 0; i < net.bus_count(); ++i) m[i] = net.buses()[i].power;
  for (const Line& l : net.lines()) {
    const double flow = net.buses()[l.from].v_set * net.buses()[l.to].v_set * l.b *
                        std::sin(theta[l.from] - theta[l.to]);
    m[l.from] -= flow;
    m[l.to] += flow;
  }
  return m;
}

SignedGraph active_power_flow_graph(const PowerNetwork& net, const Vector& theta) {
  if (theta.size() != net.bus_count()) {
    throw GraphError("active_power_flow_graph: wrong angle vector length");
  }
  std::vector<sgraph::Edge> edges;
  for (const Line& l : net.lines()) {
    const double w = net.buses()[l.from].v_set * net.buses()[l.to].v_set * l.b *
                     std::cos(theta[l.from] - theta[l.to]);
    // cos(theta_ij) == 0 exactly would zero the weight; nudge below the
    // graph's nonzero requirement cannot happen at double precision for
    // realistic angles, so we keep the raw value.
    edges.push_back({l.from, l.to, w});
  }
  return SignedGraph(net.bus_count(), std::move(edges));
}

std::vector<std::pair<int, int>> critical_lines(const PowerNetwork& net,
                                                const Vector& theta) {
  const SignedGraph g = active_power_flow_graph(net, theta);
  std::vector<std::pair<int, int>> out;
  for (const sgraph::Edge& e : g.edges()) {
    if (e.weight < 0.0) out.emplace_back(e.u, e.v);
  }
  return out;
}

Equilibrium power_flow_solve(const PowerNetwork& net, const Vector& theta0,
                             double tol, int max_iter) {
  net.require_balanced("power_flow_solve");
  const int n = net.bus_count();
  const int ref = n - 1;
  if (theta0.size() != n) {
    throw GraphError("power_flow_solve: wrong initial guess length");
  }

  Vector theta = theta0;
  theta.array() -= theta[ref];

  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i) {
    if (i != ref) free_idx.push_back(i);
  }

  for (int iter = 0; iter < max_iter; ++iter) {
    const Vector m = power_mismatch(net, theta);
    const double err = m.cwiseAbs().maxCoeff();
    if (err <= tol) return Equilibrium{theta, ref};

    const SymMatrix l = sgraph::laplacian(active_power_flow_graph(net, theta));
    Matrix f(n - 1, n - 1);
    Vector rhs(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      rhs[i] = m[free_idx[i]];
      for (int j = 0; j < n - 1; ++j) f(i, j) = l(free_idx[i], free_idx[j]);
    }
    Vector step = [&] {
      try {
        return Vector(numerics::solve_sym(SymMatrix(f), Matrix(rhs)));
      } catch (const SingularBlockError&) {
        throw SingularJacobianError(
            "power_flow_solve: reduced Jacobian singular at an iterate");
      }
    }();

    // Step halving: accept the first damped step that decreases the
    // mismatch norm; after 8 halvings take the last candidate anyway.
    double scale = 1.0;
    Vector candidate;
    for (int h = 0; h <= 8; ++h) {
      candidate = theta;
      for (int i = 0; i < n - 1; ++i) candidate[free_idx[i]] += scale * step[i];
      if (power_mismatch(net, candidate).cwiseAbs().maxCoeff() < err) break;
      scale *= 0.5;
    }
    theta = candidate;
  }
  throw NoConvergenceError("power_flow_solve: no convergence within iteration limit");
}

Matrix jacobian_dyn(const PowerNetwork& net, const Equilibrium& eq,
                    bool include_generator_damping) {
  const int n = net.bus_count();
  const std::vector<int> gens = net.generator_buses();
  const std::vector<int> loads = net.load_buses();
  const int g = static_cast<int>(gens.size());
  if (g == 0) throw GraphError("jacobian_dyn: network has no generators");
  if (net.buses()[n - 1].kind != BusKind::Load) {
    throw GraphError("jacobian_dyn: the reference (highest) bus must be a load");
  }

  const SymMatrix l = sgraph::laplacian(active_power_flow_graph(net, eq.theta));
  Matrix f = l.mat().topLeftCorner(n - 1, n - 1);

  // T = [I, -1]; T_G and T_L are its column selections.
  Matrix t(n - 1, n);
  t.setZero();
  t.topLeftCorner(n - 1, n - 1).setIdentity();
  t.col(n - 1).setConstant(-1.0);
  Matrix tg(n - 1, g);
  Matrix tl(n - 1, loads.size());
  for (int k = 0; k < g; ++k) tg.col(k) = t.col(gens[k]);
  for (size_t k = 0; k < loads.size(); ++k) tl.col(k) = t.col(loads[k]);

  Vector dl_inv(loads.size());
  for (size_t k = 0; k < loads.size(); ++k) dl_inv[k] = 1.0 / net.buses()[loads[k]].damping;
  Vector m_inv(g), dg(g);
  for (int k = 0; k < g; ++k) {
    m_inv[k] = 1.0 / net.buses()[gens[k]].inertia;
    dg[k] = include_generator_damping ? net.buses()[gens[k]].damping : 0.0;
  }

  const int dim = n - 1 + g;
  Matrix j(dim, dim);
  j.topLeftCorner(n - 1, n - 1) = -tl * dl_inv.asDiagonal() * tl.transpose() * f;
  j.topRightCorner(n - 1, g) = tg;
  j.bottomLeftCorner(g, n - 1) = -m_inv.asDiagonal() * tg.transpose() * f;
  j.bottomRightCorner(g, g) = (-m_inv.cwiseProduct(dg)).asDiagonal();
  return j;
}

Inertia spectrum_inertia(const Matrix& state, double tol) {
  Eigen::EigenSolver<Matrix> solver(state);
  if (solver.info() != Eigen::Success) {
    throw NonFiniteError("spectrum_inertia: eigensolver failed");
  }
  Inertia out;
  for (int k = 0; k < state.rows(); ++k) {
    const double re = solver.eigenvalues()[k].real();
    if (re > tol) {
      ++out.n_plus;
    } else if (re < -tol) {
      ++out.n_minus;
    } else {
      ++out.n_zero;
    }
  }
  return out;
}

EquilibriumClass classify(const PowerNetwork& net, const Equilibrium& eq) {
  const int n = net.bus_count();
  const SymMatrix l = sgraph::laplacian(active_power_flow_graph(net, eq.theta));
  Matrix fm = l.mat().topLeftCorner(n - 1, n - 1);
  const Inertia f_inertia = numerics::inertia(SymMatrix(fm));

  EquilibriumClass out;
  out.laplacian_inertia = numerics::inertia(l);
  out.jdyn_inertia = spectrum_inertia(jacobian_dyn(net, eq));
  out.critical = critical_lines(net, eq.theta);

  if (f_inertia.n_zero > 0) {
    out.variant = StabilityClass::NonHyperbolic;
    return out;
  }
  if (definiteness::is_psd_one_zero(l)) {
    out.variant = StabilityClass::StableHyperbolic;
    return out;
  }
  out.variant = StabilityClass::UnstableType;
  out.type_m = out.laplacian_inertia.n_minus;
  if (out.type_m > static_cast<int>(out.critical.size())) {
    throw Error("classify: unstable type exceeds the critical-line count");
  }
  return out;
}

double stability_indicator(const PowerNetwork& net, const Equilibrium& eq,
                           const NodeSetPair& pair) {
  const SignedGraph g = active_power_flow_graph(net, eq.theta);
  return effective::geff(g, pair).geff;
}

double coherent_swing(const PowerNetwork& net, const Equilibrium& eq,
                      const NodeSetPair& gen_pair) {
  const std::vector<int> gens = net.generator_buses();
  auto total_inertia = [&](const std::vector<int>& set) {
    double m = 0.0;
    for (int i : set) {
      if (net.buses()[i].kind != BusKind::Generator) {
        throw InvalidPairError("coherent_swing: pair must contain generator buses only");
      }
      m += net.buses()[i].inertia;
    }
    return m;
  };
  const double ma = total_inertia(gen_pair.set_a());
  const double mb = total_inertia(gen_pair.set_b());
  const double g = stability_indicator(net, eq, gen_pair);
  return (1.0 / ma + 1.0 / mb) * g;
}

}  // namespace effres::power
