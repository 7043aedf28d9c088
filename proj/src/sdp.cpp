#include "effres/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <limits>

#include "effres/errors.hpp"

namespace effres::sdp {

SdpProgram::SdpProgram(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1) throw InvalidProblemError("SdpProgram: need at least one variable");
  cost_ = Vector::Zero(num_vars);
}

int SdpProgram::add_block(int dim) {
  if (dim < 1) throw InvalidProblemError("SdpProgram: block dimension must be >= 1");
  dims_.push_back(dim);
  f0_.emplace_back();
  coeff_.emplace_back(num_vars_);
  return num_blocks() - 1;
}

void SdpProgram::add_constant(int block, int row, int col, double value) {
  if (row > col) std::swap(row, col);
  f0_[block].push_back({row, col, value});
}

void SdpProgram::add_coefficient(int block, int var, int row, int col, double value) {
  if (var < 0 || var >= num_vars_) throw InvalidProblemError("bad variable index");
  if (row > col) std::swap(row, col);
  coeff_[block][var].push_back({row, col, value});
}

void SdpProgram::add_linear_inequality(
    const std::vector<std::pair<int, double>>& lhs, double constant) {
  const int k = add_block(1);
  add_constant(k, 0, 0, constant);
  for (const auto& [var, coeff] : lhs) add_coefficient(k, var, 0, 0, coeff);
}

void SdpProgram::add_equality(const std::vector<std::pair<int, double>>& lhs,
                              double rhs) {
  eq_lhs_.push_back(lhs);
  eq_rhs_.push_back(rhs);
}

namespace {

Matrix assemble(int dim, const std::vector<SymEntry>& entries) {
  Matrix m = Matrix::Zero(dim, dim);
  for (const SymEntry& e : entries) {
    m(e.row, e.col) += e.value;
    if (e.row != e.col) m(e.col, e.row) += e.value;
  }
  return m;
}

}  // namespace

Matrix SdpProgram::constant_matrix(int k) const { return assemble(dims_[k], f0_[k]); }

Matrix SdpProgram::coefficient_matrix(int k, int i) const {
  return assemble(dims_[k], coeff_[k][i]);
}

Matrix SdpProgram::block_value(int k, const Vector& x) const {
  Matrix m = constant_matrix(k);
  for (int i = 0; i < num_vars_; ++i) {
    if (!coeff_[k][i].empty()) m += x[i] * coefficient_matrix(k, i);
  }
  return m;
}

Matrix SdpProgram::equality_matrix() const {
  Matrix a = Matrix::Zero(num_equalities(), num_vars_);
  for (int r = 0; r < num_equalities(); ++r) {
    for (const auto& [var, coeff] : eq_lhs_[r]) a(r, var) += coeff;
  }
  return a;
}

Vector SdpProgram::equality_rhs() const {
  return Eigen::Map<const Vector>(eq_rhs_.data(), eq_rhs_.size());
}

namespace {

// Dense data of the reduced (equality-free) LMI problem in the conic dual
// form: maximize b.y with C_k - sum_j y_j A_jk = S_k PSD.
struct ConicData {
  std::vector<Matrix> c;                  // per block
  std::vector<std::vector<Matrix>> a;     // [block][reduced var]
  Vector b;
  int m = 0;        // reduced variable count
  int total_dim = 0;
};

struct BlockState {
  std::vector<Matrix> x, s;
};

double inner(const Matrix& p, const Matrix& q) { return (p.array() * q.array()).sum(); }

// Largest step alpha in [0, cap] with m + alpha*dm staying PSD.
double max_step(const Matrix& m, const Matrix& dm, double cap) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix l = llt.matrixL();
  const Matrix t = l.triangularView<Eigen::Lower>().solve(dm).transpose();
  const Matrix w = l.triangularView<Eigen::Lower>().solve(t);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (w + w.transpose()),
                                           Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return cap;
  return std::min(cap, -1.0 / lmin);
}

struct NtScaling {
  Matrix r, rinv;  // X = R D R^T, S = R^-T D R^-1
  Vector lambda;   // D diagonal
};

NtScaling nt_scaling(const Matrix& x, const Matrix& s) {
  Eigen::LLT<Matrix> lx(x), ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) {
    throw NumericalFailureError("sdp: iterate left the cone during scaling");
  }
  const Matrix lxm = lx.matrixL();
  const Matrix lsm = ls.matrixL();
  Eigen::JacobiSVD<Matrix> svd(lsm.transpose() * lxm,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sigma = svd.singularValues();
  if (sigma.minCoeff() <= 0.0) {
    throw NumericalFailureError("sdp: singular NT scaling");
  }
  NtScaling nt;
  nt.lambda = sigma;
  const Vector isqrt = sigma.cwiseSqrt().cwiseInverse();
  nt.r = lxm * svd.matrixV() * isqrt.asDiagonal();
  nt.rinv = isqrt.asDiagonal() * svd.matrixU().transpose() * lsm.transpose();
  return nt;
}

}  // namespace

SolveResult solve(const SdpProgram& program, const SdpSolverOptions& options) {
  const int n_full = program.num_vars();

  // Eliminate equalities: x = x_part + N z with N spanning the null space.
  Matrix nbasis;
  Vector x_part;
  if (program.num_equalities() > 0) {
    const Matrix a = program.equality_matrix();
    const Vector b = program.equality_rhs();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    x_part = cod.solve(b);
    if ((a * x_part - b).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
      SolveResult r;
      r.status = SolveStatus::Infeasible;
      return r;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    nbasis = lu.kernel();
    if (nbasis.cols() == 0) {
      // Fully determined by the equalities; just evaluate feasibility.
      SolveResult r;
      r.x = x_part;
      bool feasible = true;
      for (int k = 0; k < program.num_blocks(); ++k) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(program.block_value(k, x_part),
                                                 Eigen::EigenvaluesOnly);
        feasible = feasible && es.eigenvalues().minCoeff() > -1e-9;
      }
      r.status = feasible ? SolveStatus::Optimal : SolveStatus::Infeasible;
      r.objective = program.cost().dot(x_part) + program.cost_offset();
      return r;
    }
  } else {
    x_part = Vector::Zero(n_full);
    nbasis = Matrix::Identity(n_full, n_full);
  }
  const int m = static_cast<int>(nbasis.cols());

  ConicData cd;
  cd.m = m;
  cd.b = -(nbasis.transpose() * program.cost());
  const int nblocks = program.num_blocks();
  cd.c.resize(nblocks);
  cd.a.resize(nblocks);
  for (int k = 0; k < nblocks; ++k) {
    const int dim = program.block_dim(k);
    cd.total_dim += dim;
    cd.c[k] = program.block_value(k, x_part);
    cd.a[k].resize(m);
    std::vector<Matrix> full(n_full);
    for (int i = 0; i < n_full; ++i) full[i] = program.coefficient_matrix(k, i);
    for (int j = 0; j < m; ++j) {
      Matrix g = Matrix::Zero(dim, dim);
      for (int i = 0; i < n_full; ++i) {
        const double w = nbasis(i, j);
        if (w != 0.0) g += w * full[i];
      }
      cd.a[k][j] = -g;  // dual form S = C - sum y_j A_jk
    }
  }

  // Infeasible start: y = 0, S = C pushed inside the cone, X = scaled identity.
  Vector y = Vector::Zero(m);
  BlockState st;
  st.x.resize(nblocks);
  st.s.resize(nblocks);
  for (int k = 0; k < nblocks; ++k) {
    const int dim = program.block_dim(k);
    const double scale = std::max(1.0, cd.c[k].cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> es(cd.c[k], Eigen::EigenvaluesOnly);
    const double shift = std::max(0.0, 1e-3 * scale - es.eigenvalues().minCoeff());
    st.s[k] = cd.c[k] + shift * Matrix::Identity(dim, dim);
    st.x[k] = scale * Matrix::Identity(dim, dim);
  }

  const double b_scale = std::max(1.0, cd.b.cwiseAbs().maxCoeff());
  double c_scale = 1.0;
  for (int k = 0; k < nblocks; ++k) {
    c_scale = std::max(c_scale, cd.c[k].cwiseAbs().maxCoeff());
  }

  SolveResult result;
  result.x = x_part;  // updated each iteration

  auto finalize = [&](SolveStatus status, int iter) {
    result.status = status;
    result.iterations = iter;
    result.x = x_part + nbasis * y;
    result.objective = program.cost().dot(result.x) + program.cost_offset();
    result.complementarity.resize(nblocks);
    for (int k = 0; k < nblocks; ++k) {
      result.complementarity[k] = (st.x[k] * st.s[k]).norm();
    }
    return result;
  };

  std::vector<NtScaling> nt(nblocks);
  std::vector<Matrix> rd(nblocks), dsa(nblocks), dxa(nblocks), ds(nblocks), dx(nblocks);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Residuals.
    Vector rp = cd.b;
    for (int k = 0; k < nblocks; ++k) {
      for (int j = 0; j < m; ++j) rp[j] -= inner(cd.a[k][j], st.x[k]);
    }
    double rd_norm = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      rd[k] = cd.c[k] - st.s[k];
      for (int j = 0; j < m; ++j) rd[k] -= y[j] * cd.a[k][j];
      rd_norm = std::max(rd_norm, rd[k].cwiseAbs().maxCoeff());
    }
    double gap = 0.0;
    for (int k = 0; k < nblocks; ++k) gap += inner(st.x[k], st.s[k]);
    const double mu = gap / cd.total_dim;

    double primal_obj = 0.0;  // <C, X> in the conic pair
    for (int k = 0; k < nblocks; ++k) primal_obj += inner(cd.c[k], st.x[k]);
    const double dual_obj = cd.b.dot(y);
    const double rel_gap =
        std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj) + std::abs(dual_obj));
    const double rel_rp = rp.cwiseAbs().maxCoeff() / b_scale;
    const double rel_rd = rd_norm / c_scale;

    result.primal_residual = rel_rp;
    result.dual_residual = rel_rd;
    result.gap = rel_gap;

    if (options.verbose) {
      std::fprintf(stderr, "iter %3d  mu %.3e  rp %.3e  rd %.3e  gap %.3e\n", iter,
                   mu, rel_rp, rel_rd, rel_gap);
    }
    if (rel_rp <= options.tolerance && rel_rd <= options.tolerance &&
        rel_gap <= options.tolerance) {
      return finalize(SolveStatus::Optimal, iter);
    }
    if (!std::isfinite(mu) || mu > 1e14) {
      return finalize(SolveStatus::NumericalFailure, iter);
    }
    if (y.cwiseAbs().maxCoeff() > 1e12) {
      // Dual variable blowing up with residuals stuck: treat as infeasible.
      return finalize(SolveStatus::Infeasible, iter);
    }

    // NT scalings and the Schur complement matrix.
    for (int k = 0; k < nblocks; ++k) nt[k] = nt_scaling(st.x[k], st.s[k]);

    Matrix schur = Matrix::Zero(m, m);
    std::vector<std::vector<Matrix>> wa(nblocks);  // W A_j W per block
    for (int k = 0; k < nblocks; ++k) {
      const Matrix w = nt[k].r * nt[k].r.transpose();
      wa[k].resize(m);
      for (int j = 0; j < m; ++j) wa[k][j] = w * cd.a[k][j] * w;
      for (int j = 0; j < m; ++j) {
        for (int l = j; l < m; ++l) {
          const double v = inner(cd.a[k][j], wa[k][l]);
          schur(j, l) += v;
          if (l != j) schur(l, j) += v;
        }
      }
    }
    Eigen::LDLT<Matrix> schur_fact(schur);
    if (schur_fact.info() != Eigen::Success) {
      return finalize(SolveStatus::NumericalFailure, iter);
    }

    auto solve_direction = [&](double sigma_mu, bool corrector) {
      // E per block in scaled space; direction equations as in the NT
      // predictor-corrector derivation.
      Vector rhs = rp;
      std::vector<Matrix> e(nblocks);
      for (int k = 0; k < nblocks; ++k) {
        const int dim = program.block_dim(k);
        const Vector& lam = nt[k].lambda;
        Matrix num = Matrix::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) num(i, i) = sigma_mu - lam[i] * lam[i];
        if (corrector) {
          const Matrix dxh = nt[k].rinv * dxa[k] * nt[k].rinv.transpose();
          const Matrix dsh = nt[k].r.transpose() * dsa[k] * nt[k].r;
          num -= 0.5 * (dxh * dsh + dsh * dxh);
        }
        for (int i = 0; i < dim; ++i) {
          for (int jj = 0; jj < dim; ++jj) num(i, jj) *= 2.0 / (lam[i] + lam[jj]);
        }
        e[k] = nt[k].r * num * nt[k].r.transpose();
        for (int j = 0; j < m; ++j) {
          rhs[j] -= inner(cd.a[k][j], e[k]);
          rhs[j] += inner(wa[k][j], rd[k]);
        }
      }
      const Vector dy = schur_fact.solve(rhs);
      for (int k = 0; k < nblocks; ++k) {
        ds[k] = rd[k];
        for (int j = 0; j < m; ++j) ds[k] -= dy[j] * cd.a[k][j];
        const Matrix w = nt[k].r * nt[k].r.transpose();
        dx[k] = e[k] - w * ds[k] * w;
      }
      return dy;
    };

    // Predictor.
    const Vector dy_aff = solve_direction(0.0, false);
    double ap = 1.0, ad = 1.0;
    for (int k = 0; k < nblocks; ++k) {
      ap = std::min(ap, max_step(st.x[k], dx[k], 1.0));
      ad = std::min(ad, max_step(st.s[k], ds[k], 1.0));
    }
    double gap_aff = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      gap_aff += inner(st.x[k] + ap * dx[k], st.s[k] + ad * ds[k]);
    }
    const double sigma = std::pow(std::max(0.0, gap_aff / gap), 3.0);

    for (int k = 0; k < nblocks; ++k) {
      dxa[k] = dx[k];
      dsa[k] = ds[k];
    }

    // Corrector.
    const Vector dy = solve_direction(sigma * mu, true);
    ap = 1.0;
    ad = 1.0;
    for (int k = 0; k < nblocks; ++k) {
      ap = std::min(ap, 0.99 * max_step(st.x[k], dx[k], 1.0 / 0.99));
      ad = std::min(ad, 0.99 * max_step(st.s[k], ds[k], 1.0 / 0.99));
    }
    if (ap <= 1e-10 || ad <= 1e-10) {
      return finalize(SolveStatus::NumericalFailure, iter);
    }
    for (int k = 0; k < nblocks; ++k) {
      st.x[k] += ap * dx[k];
      st.s[k] += ad * ds[k];
      st.x[k] = 0.5 * (st.x[k] + st.x[k].transpose());
      st.s[k] = 0.5 * (st.s[k] + st.s[k].transpose());
    }
    y += ad * dy;
  }
  return finalize(SolveStatus::MaxIter, options.max_iterations);
}

}  // namespace effres::sdp
