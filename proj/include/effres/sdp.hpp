#pragma once

#include <vector>

#include "effres/numerics.hpp"

namespace effres::sdp {

using numerics::Matrix;
using numerics::Vector;

/// One nonzero of a symmetric coefficient matrix; entries are given for
/// row <= col and mirrored implicitly.
struct SymEntry {
  int row;
  int col;
  double value;
};

/// Linear-matrix-inequality standard form
///
///   minimize    cost . x  (+ cost_offset)
///   subject to  a_eq x = b_eq
///               F0_k + sum_i x_i Fi_k  is PSD           for every block k
///
/// 1x1 blocks express ordinary linear inequalities.
class SdpProgram {
 public:
  explicit SdpProgram(int num_vars);

  int num_vars() const { return num_vars_; }
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int k) const { return dims_[k]; }

  /// Adds a PSD block of the given dimension, returns its index.
  int add_block(int dim);
  /// Accumulates into the constant term F0 of a block.
  void add_constant(int block, int row, int col, double value);
  /// Accumulates into the coefficient of variable `var` in a block.
  void add_coefficient(int block, int var, int row, int col, double value);
  /// Convenience: 1x1 block expressing  lhs . x + constant >= 0.
  void add_linear_inequality(const std::vector<std::pair<int, double>>& lhs,
                             double constant);
  /// Appends one linear equality  lhs . x = rhs.
  void add_equality(const std::vector<std::pair<int, double>>& lhs, double rhs);

  void set_cost(int var, double coeff) { cost_[var] = coeff; }
  void add_cost(int var, double coeff) { cost_[var] += coeff; }
  void set_cost_offset(double v) { cost_offset_ = v; }

  const Vector& cost() const { return cost_; }
  double cost_offset() const { return cost_offset_; }

  /// Dense F0 of a block.
  Matrix constant_matrix(int k) const;
  /// Dense coefficient matrix of variable i in block k.
  Matrix coefficient_matrix(int k, int i) const;
  /// Value of block k at a point x.
  Matrix block_value(int k, const Vector& x) const;

  int num_equalities() const { return static_cast<int>(eq_rhs_.size()); }
  Matrix equality_matrix() const;
  Vector equality_rhs() const;

 private:
  int num_vars_;
  Vector cost_;
  double cost_offset_ = 0.0;
  std::vector<int> dims_;
  std::vector<std::vector<SymEntry>> f0_;                  // per block
  std::vector<std::vector<std::vector<SymEntry>>> coeff_;  // [block][var]
  std::vector<std::vector<std::pair<int, double>>> eq_lhs_;
  std::vector<double> eq_rhs_;
};

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

struct SdpSolverOptions {
  double tolerance = 1e-7;
  int max_iterations = 200;
  bool verbose = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vector x;             // decision variables
  double objective = 0.0;  // cost . x + offset
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;  // relative duality gap
  /// Per-block ||X S||_F at termination (complementarity certificate).
  std::vector<double> complementarity;
};

/// Primal-dual interior-point solve with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector step. Equalities are eliminated through a
/// null-space basis before the cone iteration. Suited to dense problems of
/// a few hundred variables.
SolveResult solve(const SdpProgram& program, const SdpSolverOptions& options = {});

}  // namespace effres::sdp
