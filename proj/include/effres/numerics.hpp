#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "effres/errors.hpp"

namespace effres::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using IndexSet = std::vector<int>;

/// Dense real symmetric matrix. Construction symmetrizes the input via
/// (A + A^T)/2 so downstream code can rely on exact entry symmetry.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& a);

  int order() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }
  double operator()(int i, int j) const { return mat_(i, j); }

 private:
  Matrix mat_;
};

/// Eigenvalue sign counts of a symmetric matrix.
struct Inertia {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;

  bool operator==(const Inertia&) const = default;
};

/// Full spectral decomposition, eigenvalues ascending. The eigenvector sign
/// convention (first entry of magnitude above 1e-12 is positive) makes the
/// output deterministic for golden tests.
struct EigenDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;  // columns, orthonormal
};

EigenDecomp sym_eigen(const SymMatrix& a);

/// Moore-Penrose inverse via the spectral decomposition. Eigenvalues with
/// |lambda| <= tol * max|lambda| are treated as zero.
SymMatrix pseudo_inverse(const SymMatrix& a, double tol = 1e-12);

/// Counts eigenvalues above tol, below -tol and within [-tol, tol].
/// A non-positive tol requests the default 1e-9 * max(1, max|lambda|).
Inertia inertia(const SymMatrix& a, double tol = -1.0);

/// Schur complement onto `keep`: A - B D^-1 B^T where D is the block over
/// the complement of `keep`. Throws SingularBlockError when D is singular
/// by the 1e12 condition bound.
SymMatrix schur_complement(const SymMatrix& h, const IndexSet& keep);

/// Solves D X = rhs for nonsingular symmetric D (indefinite allowed).
Matrix solve_sym(const SymMatrix& d, const Matrix& rhs);

/// Real embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.
/// PSD-ness is preserved and every eigenvalue of H appears twice.
SymMatrix hermitian_realify(const ComplexMatrix& h);

/// Condition estimate max|lambda| / min|lambda| of a symmetric matrix;
/// returns +inf when the smallest magnitude eigenvalue is exactly zero.
double sym_condition(const SymMatrix& a);

}  // namespace effres::numerics
