#pragma once

#include <complex>
#include <optional>
#include <string>

#include "effres/power.hpp"
#include "effres/sdp.hpp"

namespace effres::opf {

using numerics::ComplexMatrix;
using numerics::Vector;
using power::Equilibrium;
using power::PowerNetwork;
using sgraph::NodeSetPair;

/// Quadratic generation cost c2 P^2 + c1 P + c0, c2 >= 0.
struct GenCost {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
};

/// Transient-stability-constrained OPF instance. Load injections are fixed
/// at the network values; generator injections move within [p_min, p_max].
struct OpfProblem {
  PowerNetwork net;
  std::vector<GenCost> cost;  // one entry per generator bus, generator order
  Vector p_min, p_max;        // per bus; only generator entries are used
  double theta_max = 0.0;     // per-line angle limit, radians, < pi/2
  bool geff_constraint = true;
  double g_min = 0.0;
  NodeSetPair pair;           // coherent generator groups
};

enum class OpfStatus { Optimal, Infeasible, MaxIter };

/// Voltage phasors recovered from the leading eigenpair of U.
struct RecoveredPoint {
  Equilibrium eq;
  Vector v_mag;       // |u_i| * sqrt(lambda_1)
  Vector injections;  // per bus, from the solved U
};

struct SdpSolution {
  OpfStatus status = OpfStatus::Infeasible;
  ComplexMatrix u;          // solved Hermitian matrix
  Vector injections;        // per bus
  double objective = 0.0;   // generation cost of the accepted solution
  double lower_bound = 0.0; // unpenalized relaxation value
  double rank_ratio = 0.0;  // lambda_1 / lambda_2 of U
  double penalty_epsilon = 0.0;  // 0 when no penalty resolve was needed
  int iterations = 0;
  std::optional<RecoveredPoint> recovered;
};

/// Variable layout shared by assembly and extraction: one (Re, Im) pair per
/// unordered bus pair, then one epigraph scalar per generator.
struct SdpLayout {
  int n = 0;
  int pair_count = 0;
  std::vector<int> gens;
  int re_var(int i, int j) const;
  int im_var(int i, int j) const;
  int t_var(int gen_pos) const { return 2 * pair_count + gen_pos; }
  int num_vars() const { return 2 * pair_count + static_cast<int>(gens.size()); }
};

SdpLayout make_layout(const PowerNetwork& net);

/// Builds the relaxed PSD program: realified U block, fixed diagonal, load
/// injection equalities, generator bounds, per-line angle limits, the
/// effective-conductance LMI when enabled, and 2x2 epigraph blocks for the
/// quadratic costs. An optional alignment penalty -eps * 1^T Re(U) 1 is
/// folded into the objective (used by the rank-one recovery retries).
sdp::SdpProgram assemble_sdp(const OpfProblem& prob, double penalty_eps = 0.0);

/// Solves the relaxation and, when the solution is not numerically rank
/// one, retries with the smallest alignment penalty that makes it so.
SdpSolution solve_opf(const OpfProblem& prob, bool verbose = false);

/// Extraction of the rank-one point from a solved U; returns nothing when
/// the rank ratio is below the threshold.
std::optional<RecoveredPoint> extract_rank1(const ComplexMatrix& u,
                                            const Vector& injections,
                                            double* rank_ratio_out = nullptr);

/// Post-solve audit of a recovered point against the original constraints.
struct ValidationReport {
  std::vector<std::string> violations;
  double max_mismatch = 0.0;    // power-flow residual at the recovered point
  double max_angle_deg = 0.0;   // largest line angle difference
  double geff_recovered = 0.0;  // conductance of the recovered flow graph
  double geff_lmi = 0.0;        // conductance implied by the solved U
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const SdpSolution& sol, const OpfProblem& prob);

}  // namespace effres::opf
