#include "effres/opf.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "effres/effective.hpp"
#include "effres/errors.hpp"

namespace effres::opf {

namespace {

constexpr double kRankThreshold = 1e6;
constexpr double kRecoverMismatch = 1e-5;

int pair_slot(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // slot of (i, j) in the row-major upper triangle without diagonal
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

int SdpLayout::re_var(int i, int j) const { return 2 * pair_slot(n, i, j); }
int SdpLayout::im_var(int i, int j) const { return 2 * pair_slot(n, i, j) + 1; }

SdpLayout make_layout(const PowerNetwork& net) {
  SdpLayout layout;
  layout.n = net.bus_count();
  layout.pair_count = layout.n * (layout.n - 1) / 2;
  layout.gens = net.generator_buses();
  return layout;
}

namespace {

// Signed Im coefficient of P_i: +B for canonical edges leaving i upward,
// -B for edges where i is the higher endpoint (Im U_ji = -Im U_ij).
std::vector<std::pair<int, double>> injection_terms(const PowerNetwork& net,
                                                    const SdpLayout& layout, int bus) {
  std::vector<std::pair<int, double>> terms;
  for (const power::Line& l : net.lines()) {
    if (l.from == bus) {
      terms.emplace_back(layout.im_var(l.from, l.to), l.b);
    } else if (l.to == bus) {
      terms.emplace_back(layout.im_var(l.from, l.to), -l.b);
    }
  }
  return terms;
}

void check_problem(const OpfProblem& prob) {
  const int n = prob.net.bus_count();
  const std::vector<int> gens = prob.net.generator_buses();
  if (prob.cost.size() != gens.size()) {
    throw InvalidProblemError("OpfProblem: one cost entry per generator required");
  }
  for (const GenCost& c : prob.cost) {
    if (c.c2 < 0.0) throw InvalidProblemError("OpfProblem: c2 must be >= 0");
  }
  if (prob.p_min.size() != n || prob.p_max.size() != n) {
    throw InvalidProblemError("OpfProblem: bounds must cover every bus");
  }
  for (int i : gens) {
    if (prob.p_min[i] > prob.p_max[i]) {
      throw InvalidProblemError("OpfProblem: inverted generator bounds");
    }
  }
  if (!(prob.theta_max > 0.0) || !(prob.theta_max < M_PI / 2)) {
    throw InvalidProblemError("OpfProblem: theta_max must lie in (0, pi/2)");
  }
  if (prob.pair.node_count() != n) {
    throw InvalidProblemError("OpfProblem: pair built for a different network");
  }
  for (int i : prob.pair.set_a()) {
    if (prob.net.buses()[i].kind != power::BusKind::Generator) {
      throw InvalidProblemError("OpfProblem: pair sets must hold generator buses");
    }
  }
  for (int i : prob.pair.set_b()) {
    if (prob.net.buses()[i].kind != power::BusKind::Generator) {
      throw InvalidProblemError("OpfProblem: pair sets must hold generator buses");
    }
  }
}

}  // namespace

sdp::SdpProgram assemble_sdp(const OpfProblem& prob, double penalty_eps) {
  check_problem(prob);
  const PowerNetwork& net = prob.net;
  const int n = net.bus_count();
  const SdpLayout layout = make_layout(net);
  sdp::SdpProgram program(layout.num_vars());

  // Realified U: [[Re U, -Im U], [Im U, Re U]], diagonal fixed at V_set^2.
  const int ublock = program.add_block(2 * n);
  for (int i = 0; i < n; ++i) {
    const double v2 = net.buses()[i].v_set * net.buses()[i].v_set;
    program.add_constant(ublock, i, i, v2);
    program.add_constant(ublock, n + i, n + i, v2);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int re = layout.re_var(i, j);
      const int im = layout.im_var(i, j);
      program.add_coefficient(ublock, re, i, j, 1.0);
      program.add_coefficient(ublock, re, n + i, n + j, 1.0);
      program.add_coefficient(ublock, im, i, n + j, -1.0);
      program.add_coefficient(ublock, im, j, n + i, 1.0);
    }
  }

  // Injection split: loads pinned, generators boxed.
  for (int i = 0; i < n; ++i) {
    const auto terms = injection_terms(net, layout, i);
    if (net.buses()[i].kind == power::BusKind::Load) {
      program.add_equality(terms, net.buses()[i].power);
    } else {
      program.add_linear_inequality(terms, -prob.p_min[i]);
      auto neg = terms;
      for (auto& t : neg) t.second = -t.second;
      program.add_linear_inequality(neg, prob.p_max[i]);
    }
  }

  // Per-line angle limits plus the strict positivity of Re U on lines that
  // keeps the quadratic flow graph positively weighted.
  const double tan_max = std::tan(prob.theta_max);
  for (const power::Line& l : net.lines()) {
    const int re = layout.re_var(l.from, l.to);
    const int im = layout.im_var(l.from, l.to);
    program.add_linear_inequality({{re, tan_max}, {im, -1.0}}, 0.0);
    program.add_linear_inequality({{re, tan_max}, {im, 1.0}}, 0.0);
    program.add_linear_inequality({{re, 1.0}}, -1e-6);
  }

  // Effective-conductance LMI over the clustered incidence structure:
  // corner g_eff-like quadratic form minus g_min, bordered by the V_c rows.
  if (prob.geff_constraint) {
    const auto& va = prob.pair.set_a();
    const auto& vc = prob.pair.set_c();
    std::vector<int> cpos(n, -1);
    for (size_t q = 0; q < vc.size(); ++q) cpos[vc[q]] = static_cast<int>(q);
    std::vector<bool> in_a(n, false);
    for (int i : va) in_a[i] = true;

    const int hblock = program.add_block(1 + static_cast<int>(vc.size()));
    program.add_constant(hblock, 0, 0, -prob.g_min);
    for (const power::Line& l : net.lines()) {
      const int re = layout.re_var(l.from, l.to);
      const double b = l.b;  // weight of this edge is b * Re U
      const double da = (in_a[l.from] ? 1.0 : 0.0) - (in_a[l.to] ? 1.0 : 0.0);
      if (da != 0.0) program.add_coefficient(hblock, re, 0, 0, b * da * da);
      auto edge_col = [&](int node) { return cpos[node] >= 0 ? 1 + cpos[node] : -1; };
      const int cu = edge_col(l.from);
      const int cv = edge_col(l.to);
      if (da != 0.0) {
        if (cu >= 0) program.add_coefficient(hblock, re, 0, cu, b * da);
        if (cv >= 0) program.add_coefficient(hblock, re, 0, cv, -b * da);
      }
      if (cu >= 0) program.add_coefficient(hblock, re, cu, cu, b);
      if (cv >= 0) program.add_coefficient(hblock, re, cv, cv, b);
      if (cu >= 0 && cv >= 0) program.add_coefficient(hblock, re, cu, cv, -b);
    }
  }

  // Quadratic costs through 2x2 epigraph blocks [[1, sqrt(c2) P], [., t]].
  const std::vector<int>& gens = layout.gens;
  for (size_t k = 0; k < gens.size(); ++k) {
    const GenCost& c = prob.cost[k];
    const int tb = program.add_block(2);
    program.add_constant(tb, 0, 0, 1.0);
    if (c.c2 > 0.0) {
      const double s = std::sqrt(c.c2);
      for (const auto& [var, coeff] : injection_terms(net, layout, gens[k])) {
        program.add_coefficient(tb, var, 0, 1, s * coeff);
      }
    }
    program.add_coefficient(tb, layout.t_var(static_cast<int>(k)), 1, 1, 1.0);
    program.add_cost(layout.t_var(static_cast<int>(k)), 1.0);
    for (const auto& [var, coeff] : injection_terms(net, layout, gens[k])) {
      program.add_cost(var, c.c1 * coeff);
    }
    program.set_cost_offset(program.cost_offset() + c.c0);
  }

  // Alignment penalty -eps * 1^T Re(U) 1 (the diagonal part is constant).
  if (penalty_eps > 0.0) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        program.add_cost(layout.re_var(i, j), -2.0 * penalty_eps);
      }
    }
  }
  return program;
}

namespace {

ComplexMatrix build_u(const PowerNetwork& net, const SdpLayout& layout,
                      const Vector& x) {
  const int n = layout.n;
  ComplexMatrix u(n, n);
  for (int i = 0; i < n; ++i) {
    u(i, i) = net.buses()[i].v_set * net.buses()[i].v_set;
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> val(x[layout.re_var(i, j)], x[layout.im_var(i, j)]);
      u(i, j) = val;
      u(j, i) = std::conj(val);
    }
  }
  return u;
}

Vector injections_from(const PowerNetwork& net, const SdpLayout& layout,
                       const Vector& x) {
  Vector p = Vector::Zero(layout.n);
  for (int i = 0; i < layout.n; ++i) {
    for (const auto& [var, coeff] : injection_terms(net, layout, i)) {
      p[i] += coeff * x[var];
    }
  }
  return p;
}

double generation_cost(const OpfProblem& prob, const Vector& p) {
  double total = 0.0;
  const std::vector<int> gens = prob.net.generator_buses();
  for (size_t k = 0; k < gens.size(); ++k) {
    const double pi = p[gens[k]];
    total += prob.cost[k].c2 * pi * pi + prob.cost[k].c1 * pi + prob.cost[k].c0;
  }
  return total;
}

}  // namespace

std::optional<RecoveredPoint> extract_rank1(const ComplexMatrix& u,
                                            const Vector& injections,
                                            double* rank_ratio_out) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(u);
  const Vector ev = es.eigenvalues();  // ascending
  const int n = static_cast<int>(u.rows());
  const double l1 = ev[n - 1];
  const double l2 = std::max(std::abs(ev[n - 2]), 1e-300);
  const double ratio = l1 / l2;
  if (rank_ratio_out) *rank_ratio_out = ratio;
  if (!(ratio >= kRankThreshold)) return std::nullopt;

  Eigen::VectorXcd lead = es.eigenvectors().col(n - 1) * std::sqrt(std::max(l1, 0.0));
  const int ref = n - 1;
  const std::complex<double> phase =
      std::abs(lead[ref]) > 0.0 ? lead[ref] / std::abs(lead[ref]) : 1.0;
  lead = lead / phase;

  RecoveredPoint out;
  out.eq.reference_bus = ref;
  out.eq.theta = Vector(n);
  out.v_mag = Vector(n);
  for (int i = 0; i < n; ++i) {
    out.eq.theta[i] = std::arg(lead[i]);
    out.v_mag[i] = std::abs(lead[i]);
  }
  out.injections = injections;
  return out;
}

SdpSolution solve_opf(const OpfProblem& prob, bool verbose) {
  check_problem(prob);
  const SdpLayout layout = make_layout(prob.net);
  sdp::SdpSolverOptions opts;
  opts.tolerance = 1e-9;
  opts.verbose = verbose;

  auto run = [&](double eps) {
    const sdp::SdpProgram program = assemble_sdp(prob, eps);
    return sdp::solve(program, opts);
  };

  auto mismatch_ok = [&](const RecoveredPoint& rec) {
    const PowerNetwork net_rec = prob.net.with_injections(rec.injections);
    return power::power_mismatch(net_rec, rec.eq.theta).cwiseAbs().maxCoeff() <=
           kRecoverMismatch;
  };

  SdpSolution sol;
  const sdp::SolveResult base = run(0.0);
  sol.iterations = base.iterations;
  if (base.status == sdp::SolveStatus::Infeasible) {
    sol.status = OpfStatus::Infeasible;
    return sol;
  }
  if (base.status == sdp::SolveStatus::NumericalFailure) {
    throw NumericalFailureError("solve_opf: interior-point breakdown on the relaxation");
  }
  if (base.status == sdp::SolveStatus::MaxIter) {
    sol.status = OpfStatus::MaxIter;
  } else {
    sol.status = OpfStatus::Optimal;
  }

  sol.u = build_u(prob.net, layout, base.x);
  sol.injections = injections_from(prob.net, layout, base.x);
  sol.lower_bound = generation_cost(prob, sol.injections);
  sol.objective = sol.lower_bound;
  sol.recovered = extract_rank1(sol.u, sol.injections, &sol.rank_ratio);
  if (sol.recovered && mismatch_ok(*sol.recovered)) return sol;
  sol.recovered.reset();
  if (sol.status != OpfStatus::Optimal) return sol;

  // Rank-one recovery: escalate the alignment penalty until the solution
  // turns numerically rank one, then bisect back to the least distorting
  // penalty that still does.
  auto attempt = [&](double eps) -> std::optional<SdpSolution> {
    const sdp::SolveResult r = run(eps);
    if (r.status != sdp::SolveStatus::Optimal) return std::nullopt;
    SdpSolution cand = sol;
    cand.penalty_epsilon = eps;
    cand.iterations = r.iterations;
    cand.u = build_u(prob.net, layout, r.x);
    cand.injections = injections_from(prob.net, layout, r.x);
    cand.objective = generation_cost(prob, cand.injections);
    cand.recovered = extract_rank1(cand.u, cand.injections, &cand.rank_ratio);
    if (!cand.recovered || !mismatch_ok(*cand.recovered)) return std::nullopt;
    return cand;
  };

  const double eps0 = 1e-5 * std::max(1.0, std::abs(sol.lower_bound));
  double lo = 0.0;
  double hi = eps0;
  std::optional<SdpSolution> found;
  for (int k = 0; k < 8 && !found; ++k) {
    found = attempt(hi);
    if (!found) {
      lo = hi;
      hi *= 10.0;
    }
  }
  if (!found) {
    throw RankRecoveryError("solve_opf: rank-one recovery failed after penalty retries");
  }
  for (int k = 0; k < 8; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (auto cand = attempt(mid)) {
      found = std::move(cand);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return *found;
}

ValidationReport validate(const SdpSolution& sol, const OpfProblem& prob) {
  ValidationReport report;
  if (!sol.recovered) {
    report.violations.push_back("no recovered rank-one point");
    return report;
  }
  const RecoveredPoint& rec = *sol.recovered;
  const PowerNetwork& net = prob.net;
  const int n = net.bus_count();

  const PowerNetwork net_rec = net.with_injections(rec.injections);
  report.max_mismatch = power::power_mismatch(net_rec, rec.eq.theta).cwiseAbs().maxCoeff();
  if (report.max_mismatch > kRecoverMismatch) {
    report.violations.push_back("power-flow mismatch above 1e-5");
  }

  for (int i : net.generator_buses()) {
    if (rec.injections[i] < prob.p_min[i] - 1e-6 ||
        rec.injections[i] > prob.p_max[i] + 1e-6) {
      report.violations.push_back("generator injection outside bounds at bus " +
                                  std::to_string(i + 1));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(rec.v_mag[i] - net.buses()[i].v_set) > 1e-4) {
      report.violations.push_back("voltage magnitude deviates from setpoint at bus " +
                                  std::to_string(i + 1));
    }
  }
  for (const power::Line& l : net.lines()) {
    const double d = std::abs(rec.eq.theta[l.from] - rec.eq.theta[l.to]);
    report.max_angle_deg = std::max(report.max_angle_deg, d * 180.0 / M_PI);
    if (d > prob.theta_max + 1e-6) {
      report.violations.push_back("angle limit violated on line (" +
                                  std::to_string(l.from + 1) + "," +
                                  std::to_string(l.to + 1) + ")");
    }
  }

  const sgraph::SignedGraph apfg = power::active_power_flow_graph(net, rec.eq.theta);
  report.geff_recovered = effective::geff(apfg, prob.pair).geff;

  // Conductance implied by the solved U through the quadratic flow weights
  // B_ij Re U_ij; coincides with the recovered-graph value at rank one.
  std::vector<sgraph::Edge> edges;
  for (const power::Line& l : net.lines()) {
    edges.push_back({l.from, l.to, l.b * sol.u(l.from, l.to).real()});
  }
  const sgraph::SignedGraph qgraph(n, std::move(edges));
  report.geff_lmi = effective::geff(qgraph, prob.pair).geff;

  if (prob.geff_constraint && report.geff_recovered < prob.g_min - 1e-4) {
    report.violations.push_back("effective conductance below g_min at recovery");
  }
  return report;
}

}  // namespace effres::opf
