#include "effres/simulate.hpp"

#include <cmath>
#include <ostream>

#include "effres/errors.hpp"

namespace effres::simulate {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Packed state: [theta (n); omega (g)].
struct Model {
  const PowerNetwork& net;
  std::vector<int> gens;
  double fault_drain = 0.0;  // extra power drawn at fault_bus while active
  int fault_bus = -1;
  bool zero_damping = false;

  Vector rhs(const Vector& x, bool fault_on) const {
    const int n = net.bus_count();
    const int g = static_cast<int>(gens.size());
    Vector flow = Vector::Zero(n);
    for (const power::Line& l : net.lines()) {
      const double f = net.buses()[l.from].v_set * net.buses()[l.to].v_set * l.b *
                       std::sin(x[l.from] - x[l.to]);
      flow[l.from] += f;
      flow[l.to] -= f;
    }
    Vector dx(n + g);
    int gi = 0;
    for (int i = 0; i < n; ++i) {
      double p = net.buses()[i].power - flow[i];
      if (fault_on && i == fault_bus) p -= fault_drain;
      if (net.buses()[i].kind == power::BusKind::Generator) {
        dx[i] = x[n + gi];
        ++gi;
      } else {
        dx[i] = p / net.buses()[i].damping;
      }
    }
    gi = 0;
    for (int i : gens) {
      double p = net.buses()[i].power - flow[i];
      if (fault_on && i == fault_bus) p -= fault_drain;
      const double d = zero_damping ? 0.0 : net.buses()[i].damping;
      dx[n + gi] = (p - d * x[n + gi]) / net.buses()[i].inertia;
      ++gi;
    }
    return dx;
  }
};

Vector rk4_step(const Model& model, const Vector& x, double h, bool fault_on) {
  const Vector k1 = model.rhs(x, fault_on);
  const Vector k2 = model.rhs(x + 0.5 * h * k1, fault_on);
  const Vector k3 = model.rhs(x + 0.5 * h * k2, fault_on);
  const Vector k4 = model.rhs(x + h * k3, fault_on);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory simulate(const PowerNetwork& net, const Equilibrium& eq,
                    const FaultScenario& fault, const SimOptions& opts) {
  if (fault.bus < 0 || fault.bus >= net.bus_count()) {
    throw GraphError("simulate: fault bus out of range");
  }
  if (!(fault.ground_resistance > 0.0)) {
    throw GraphError("simulate: ground resistance must be positive");
  }
  if (fault.t_clear < 0.0) throw GraphError("simulate: negative clearing time");
  if (opts.zero_damping && !net.load_buses().empty()) {
    throw GraphError("simulate: zero-damping runs need an all-generator network");
  }

  const int n = net.bus_count();
  const std::vector<int> gens = net.generator_buses();
  const int g = static_cast<int>(gens.size());

  Model model{net, gens};
  model.fault_bus = fault.bus;
  model.fault_drain =
      net.buses()[fault.bus].v_set * net.buses()[fault.bus].v_set / fault.ground_resistance;
  model.zero_damping = opts.zero_damping;

  Vector x(n + g);
  x.head(n) = eq.theta;
  x.tail(g).setZero();

  const int steps = static_cast<int>(std::llround(opts.t_end / opts.dt));
  const int clear_step = static_cast<int>(std::llround(fault.t_clear / opts.dt));

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.theta.reserve(steps + 1);
  traj.omega_g.reserve(steps + 1);
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.theta.push_back(x.head(n));
    traj.omega_g.push_back(x.tail(g));
  };
  record(0.0);

  std::vector<double> spread;
  spread.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const bool fault_on = k < clear_step;
    x = rk4_step(model, x, opts.dt, fault_on);
    if (!x.allFinite() || x.head(n).cwiseAbs().maxCoeff() > 1e4) {
      traj.verdict = Verdict::Diverged;
      return traj;
    }
    record((k + 1) * opts.dt);
    double lo = x[gens.front()], hi = lo;
    for (int i : gens) {
      lo = std::min(lo, x[i]);
      hi = std::max(hi, x[i]);
    }
    spread.push_back(hi - lo);
  }

  const size_t tail_start = spread.size() - spread.size() / 5;
  double worst = 0.0;
  for (size_t k = tail_start; k < spread.size(); ++k) worst = std::max(worst, spread[k]);
  traj.verdict = worst < kPi ? Verdict::Stable : Verdict::Unstable;
  return traj;
}

double cct_search(const PowerNetwork& net, const Equilibrium& eq,
                  const FaultScenario& fault_template, double t_max, double tol,
                  const SimOptions& opts) {
  const power::EquilibriumClass cls = power::classify(net, eq);
  if (cls.variant != power::StabilityClass::StableHyperbolic) {
    return 0.0;  // a UEP has no clearing margin
  }

  auto stable_at = [&](double t_clear) {
    FaultScenario f = fault_template;
    f.t_clear = t_clear;
    return simulate(net, eq, f, opts).verdict == Verdict::Stable;
  };

  if (!stable_at(0.0)) return 0.0;
  if (stable_at(t_max)) return t_max;
  double lo = 0.0, hi = t_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (stable_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void write_trajectory_csv(std::ostream& os, const PowerNetwork& net,
                          const Trajectory& traj) {
  const int n = net.bus_count();
  const std::vector<int> gens = net.generator_buses();
  os << "t";
  for (int i = 0; i < n; ++i) os << ",theta_" << (i + 1);
  for (int i : gens) os << ",omega_" << (i + 1);
  os << ",stable\n";
  const int stable = traj.verdict == Verdict::Stable ? 1 : 0;
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    os << buf;
  };
  for (size_t k = 0; k < traj.times.size(); ++k) {
    put(traj.times[k]);
    for (int i = 0; i < n; ++i) {
      os << ',';
      put(traj.theta[k][i] * 180.0 / kPi);
    }
    for (int i = 0; i < traj.omega_g[k].size(); ++i) {
      os << ',';
      put(traj.omega_g[k][i]);
    }
    os << ',' << stable << '\n';
  }
}

double swing_energy(const PowerNetwork& net, const Vector& theta, const Vector& omega_g) {
  double e = 0.0;
  int gi = 0;
  for (int i : net.generator_buses()) {
    e += 0.5 * net.buses()[i].inertia * omega_g[gi] * omega_g[gi];
    ++gi;
  }
  for (const power::Line& l : net.lines()) {
    e -= net.buses()[l.from].v_set * net.buses()[l.to].v_set * l.b *
         std::cos(theta[l.from] - theta[l.to]);
  }
  return e;
}

}  // namespace effres::simulate
