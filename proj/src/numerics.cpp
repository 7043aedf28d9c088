#include "effres/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace effres::numerics {

namespace {

void require_finite(const Matrix& a, const char* who) {
  if (!a.allFinite()) {
    throw NonFiniteError(std::string(who) + ": matrix has NaN or Inf entries");
  }
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error("SymMatrix: input must be square with order >= 1");
  }
  require_finite(a, "SymMatrix");
  mat_ = 0.5 * (a + a.transpose());
}

EigenDecomp sym_eigen(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw NonFiniteError("sym_eigen: eigendecomposition failed");
  }
  EigenDecomp out{solver.eigenvalues(), solver.eigenvectors()};
  // Fix eigenvector signs: first entry of magnitude above 1e-12 positive.
  for (int k = 0; k < out.eigenvectors.cols(); ++k) {
    for (int i = 0; i < out.eigenvectors.rows(); ++i) {
      const double v = out.eigenvectors(i, k);
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) out.eigenvectors.col(k) = -out.eigenvectors.col(k);
        break;
      }
    }
  }
  return out;
}

SymMatrix pseudo_inverse(const SymMatrix& a, double tol) {
  const EigenDecomp ed = sym_eigen(a);
  const double lmax = ed.eigenvalues.cwiseAbs().maxCoeff();
  const double cut = tol * std::max(lmax, 1e-300);
  Vector inv = Vector::Zero(ed.eigenvalues.size());
  for (int k = 0; k < inv.size(); ++k) {
    if (std::abs(ed.eigenvalues[k]) > cut) inv[k] = 1.0 / ed.eigenvalues[k];
  }
  return SymMatrix(ed.eigenvectors * inv.asDiagonal() *
                   ed.eigenvectors.transpose());
}

Inertia inertia(const SymMatrix& a, double tol) {
  const EigenDecomp ed = sym_eigen(a);
  if (tol <= 0.0) {
    tol = 1e-9 * std::max(1.0, ed.eigenvalues.cwiseAbs().maxCoeff());
  }
  Inertia out;
  for (int k = 0; k < ed.eigenvalues.size(); ++k) {
    const double l = ed.eigenvalues[k];
    if (l > tol) {
      ++out.n_plus;
    } else if (l < -tol) {
      ++out.n_minus;
    } else {
      ++out.n_zero;
    }
  }
  return out;
}

double sym_condition(const SymMatrix& a) {
  const EigenDecomp ed = sym_eigen(a);
  const double lmax = ed.eigenvalues.cwiseAbs().maxCoeff();
  const double lmin = ed.eigenvalues.cwiseAbs().minCoeff();
  if (lmin == 0.0) return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

SymMatrix schur_complement(const SymMatrix& h, const IndexSet& keep) {
  const int n = h.order();
  std::vector<bool> kept(n, false);
  for (int i : keep) {
    if (i < 0 || i >= n) throw Error("schur_complement: keep index out of range");
    if (kept[i]) throw Error("schur_complement: duplicate keep index");
    kept[i] = true;
  }
  IndexSet elim;
  for (int i = 0; i < n; ++i) {
    if (!kept[i]) elim.push_back(i);
  }
  if (keep.empty()) throw Error("schur_complement: keep set must be nonempty");
  if (elim.empty()) return SymMatrix(h.mat());

  const int p = static_cast<int>(keep.size());
  const int q = static_cast<int>(elim.size());
  Matrix a(p, p), b(p, q), d(q, q);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) a(i, j) = h(keep[i], keep[j]);
    for (int j = 0; j < q; ++j) b(i, j) = h(keep[i], elim[j]);
  }
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) d(i, j) = h(elim[i], elim[j]);
  }

  const Matrix x = solve_sym(SymMatrix(d), b.transpose());
  return SymMatrix(a - b * x);
}

Matrix solve_sym(const SymMatrix& d, const Matrix& rhs) {
  require_finite(rhs, "solve_sym");
  if (rhs.rows() != d.order()) {
    throw Error("solve_sym: rhs row count does not match matrix order");
  }
  Eigen::FullPivLU<Matrix> lu(d.mat());
  // Condition bound from the pivot magnitudes of the factorization.
  const Matrix& u = lu.matrixLU();
  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < u.rows(); ++k) {
    const double p = std::abs(u(k, k));
    pmax = std::max(pmax, p);
    pmin = std::min(pmin, p);
  }
  if (pmin == 0.0 || pmax / pmin > 1e12) {
    throw SingularBlockError(
        "solve_sym: block is singular or beyond the 1e12 condition bound");
  }
  return lu.solve(rhs);
}

SymMatrix hermitian_realify(const ComplexMatrix& h) {
  if (h.rows() != h.cols() || h.rows() < 1) {
    throw Error("hermitian_realify: input must be square");
  }
  const double scale = std::max(1e-300, h.cwiseAbs().maxCoeff());
  const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12 * scale) {
    throw NotHermitianError("hermitian_realify: ||H - H*|| exceeds 1e-12 * ||H||");
  }
  const int n = static_cast<int>(h.rows());
  const Matrix re = h.real();
  const Matrix im = h.imag();
  Matrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return SymMatrix(out);
}

}  // namespace effres::numerics
