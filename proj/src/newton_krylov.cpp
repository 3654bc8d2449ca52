#include "hamrec/newton_krylov.hpp"

#include <lapacke.h>

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hamrec {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

GmresResult gmres_solve(const LinearOperator& op,
                        const std::vector<double>& rhs,
                        const LinearOperator* precond, const KrylovConfig& cfg,
                        std::vector<double>* residual_history) {
  const int n = op.dimension;
  assert(static_cast<int>(rhs.size()) == n);
  const int m = std::max(1, cfg.restart);

  GmresResult out;
  out.solution.assign(n, 0.0);

  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    out.status = GmresStatus::converged;
    return out;
  }
  const double target = cfg.rel_tol * bnorm;

  std::vector<std::vector<double>> V;   // Arnoldi basis
  std::vector<std::vector<double>> H;   // Hessenberg columns, H[j] has j+2 entries
  std::vector<double> cs(m), sn(m), g(m + 1);
  std::vector<double> w(n), z(n);

  auto apply_precond = [&](const std::vector<double>& x,
                           std::vector<double>& y) {
    if (precond) {
      precond->apply(x, y);
    } else {
      y = x;
    }
  };

  // x = x0 + P V y from the least-squares coefficients of the current cycle
  auto form_solution = [&](int j_cols) {
    std::vector<double> y(j_cols);
    for (int i = j_cols - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < j_cols; ++l) s -= H[l][i] * y[l];
      y[i] = s / H[i][i];
    }
    std::vector<double> corr(n, 0.0);
    for (int l = 0; l < j_cols; ++l) {
      for (int i = 0; i < n; ++i) corr[i] += V[l][i] * y[l];
    }
    apply_precond(corr, z);
    for (int i = 0; i < n; ++i) out.solution[i] += z[i];
  };

  std::vector<double> r = rhs;  // residual of x0 = 0
  double rnorm = bnorm;
  while (true) {
    if (rnorm <= target) {
      out.status = GmresStatus::converged;
      out.residual_norm = rnorm;
      return out;
    }
    V.assign(1, r);
    for (double& x : V[0]) x /= rnorm;
    H.clear();
    g.assign(m + 1, 0.0);
    g[0] = rnorm;

    int j = 0;
    bool breakdown = false;
    for (; j < m && out.iterations < cfg.max_iters; ++j) {
      apply_precond(V[j], z);
      op.apply(z, w);
      H.emplace_back(j + 2, 0.0);
      for (int i = 0; i <= j; ++i) {
        H[j][i] = dot(w, V[i]);
        for (int l = 0; l < n; ++l) w[l] -= H[j][i] * V[i][l];
      }
      const double h_sub = norm2(w);  // new Arnoldi vector norm
      H[j][j + 1] = h_sub;
      // previous Givens rotations on the new column
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
        H[j][i + 1] = -sn[i] * H[j][i] + cs[i] * H[j][i + 1];
        H[j][i] = t;
      }
      const double denom = std::hypot(H[j][j], H[j][j + 1]);
      if (denom == 0.0) {
        // dead column: no information to solve for this coefficient
        breakdown = true;
        ++out.iterations;
        break;
      }
      cs[j] = H[j][j] / denom;
      sn[j] = H[j][j + 1] / denom;
      H[j][j] = denom;
      H[j][j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++out.iterations;
      rnorm = std::abs(g[j + 1]);
      if (residual_history) residual_history->push_back(rnorm);

      if (h_sub == 0.0) {
        // zero Arnoldi vector: invariant subspace, the least-squares solve
        // below is exact; anything short of the tolerance is a breakdown
        ++j;
        breakdown = true;
        break;
      }
      if (rnorm <= target) {
        ++j;
        break;
      }
      V.push_back(w);
      for (double& x : V.back()) x /= h_sub;
    }

    form_solution(j);
    op.apply(out.solution, w);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - w[i];
    rnorm = norm2(r);
    out.residual_norm = rnorm;
    if (rnorm <= target) {
      out.status = GmresStatus::converged;
      return out;
    }
    if (breakdown) {
      out.status = GmresStatus::breakdown;
      return out;
    }
    if (out.iterations >= cfg.max_iters) {
      out.status = GmresStatus::max_iterations;
      return out;
    }
  }
}

std::vector<double> heat_gs_preconditioner_apply(
    const HeatJacobianBlocks& blocks, const std::vector<double>& rhs) {
  const int nn = blocks.n_nodes;
  const int N = blocks.n_steps;
  assert(static_cast<int>(rhs.size()) == blocks.dimension());
  std::vector<double> out(blocks.dimension(), 0.0);
  const double* f = rhs.data();
  const double* g = rhs.data() + N * nn;
  double* xu = out.data();
  double* xq = out.data() + N * nn;

  NodalField r(nn);
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) r[i] = f[n * nn + i];
    if (n > 0) blocks.mass.apply_add(xu + (n - 1) * nn, r.data(), 1.0);
    const NodalField sol = blocks.K11_diag[n].solve(r);
    for (int i = 0; i < nn; ++i) xu[n * nn + i] = sol[i];
  }
  for (int n = N - 1; n >= 0; --n) {
    for (int i = 0; i < nn; ++i) r[i] = g[n * nn + i];
    blocks.K21_diag[n].apply_add(xu + n * nn, r.data(), -1.0);
    if (n < N - 1) blocks.mass.apply_add(xq + (n + 1) * nn, r.data(), 1.0);
    const NodalField sol = blocks.K11_diag[n].solve(r);
    for (int i = 0; i < nn; ++i) xq[n * nn + i] = sol[i];
  }
  return out;
}

namespace {

/// LAPACK band storage (column-major) with assembly guarded against
/// writes outside the declared band.
struct BandedMatrix {
  int dim = 0, kl = 0, ku = 0, ldab = 0;
  std::vector<double> ab;

  BandedMatrix(int dim_, int kl_, int ku_)
      : dim(dim_), kl(kl_), ku(ku_), ldab(2 * kl_ + ku_ + 1),
        ab(static_cast<size_t>(ldab) * dim_, 0.0) {}

  void add(int i, int j, double v) {
    if (j - i > ku || i - j > kl) {
      throw std::logic_error("banded assembly: entry outside the declared band");
    }
    ab[static_cast<size_t>(j) * ldab + kl + ku + i - j] += v;
  }

  void add_tridiag(const TridiagonalMatrix& t, int row0, int col0,
                   double scale) {
    for (int i = 0; i < t.n; ++i) {
      add(row0 + i, col0 + i, scale * t.main[i]);
      if (i + 1 < t.n) {
        add(row0 + i + 1, col0 + i, scale * t.lower[i]);
        add(row0 + i, col0 + i + 1, scale * t.upper[i]);
      }
    }
  }

  // in-place solve, rhs overwritten with the solution
  void solve(std::vector<double>& rhs) {
    assert(static_cast<int>(rhs.size()) == dim);
    std::vector<lapack_int> ipiv(dim);
    lapack_int info =
        LAPACKE_dgbsv(LAPACK_COL_MAJOR, dim, kl, ku, 1, ab.data(), ldab,
                      ipiv.data(), rhs.data(), dim);
    if (info != 0) {
      throw std::runtime_error("banded solve: singular pivot at row " +
                               std::to_string(info));
    }
  }
};

}  // namespace

std::vector<double> banded_direct_solve(const HeatJacobianBlocks& blocks,
                                        const std::vector<double>& rhs) {
  const int nn = blocks.n_nodes;
  const int N = blocks.n_steps;
  assert(static_cast<int>(rhs.size()) == blocks.dimension());
  const int hw = heat_band_halfwidth(nn);
  BandedMatrix mat(blocks.dimension(), hw, hw);

  // pair n holds [u_{n+1} | q_n]
  const auto urow = [nn](int n) { return 2 * nn * n; };
  const auto qrow = [nn](int n) { return 2 * nn * n + nn; };
  for (int n = 0; n < N; ++n) {
    mat.add_tridiag(blocks.K11_diag[n], urow(n), urow(n), 1.0);
    if (n > 0) mat.add_tridiag(blocks.mass, urow(n), urow(n - 1), -1.0);
    mat.add_tridiag(blocks.K12_diag[n], urow(n), qrow(n), 1.0);
    mat.add_tridiag(blocks.K21_diag[n], qrow(n), urow(n), 1.0);
    mat.add_tridiag(blocks.K11_diag[n], qrow(n), qrow(n), 1.0);
    if (n < N - 1) mat.add_tridiag(blocks.mass, qrow(n), qrow(n + 1), -1.0);
  }

  std::vector<double> b(blocks.dimension());
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      b[urow(n) + i] = rhs[n * nn + i];
      b[qrow(n) + i] = rhs[(N + n) * nn + i];
    }
  }
  mat.solve(b);
  std::vector<double> x(blocks.dimension());
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      x[n * nn + i] = b[urow(n) + i];
      x[(N + n) * nn + i] = b[qrow(n) + i];
    }
  }
  return x;
}

std::vector<double> banded_direct_solve(const WaveJacobianBlocks& blocks,
                                        const std::vector<double>& rhs) {
  const int nn = blocks.n_nodes;
  const int N = blocks.n_steps;
  assert(static_cast<int>(rhs.size()) == blocks.dimension());
  const double k = blocks.k;
  const int hw = wave_band_halfwidth(nn);
  BandedMatrix mat(blocks.dimension(), hw, hw);

  // quadruple n holds [u_{n+1} | v_{n+1} | p_n | q_n]
  const auto urow = [nn](int n) { return 4 * nn * n; };
  const auto vrow = [nn](int n) { return 4 * nn * n + nn; };
  const auto prow = [nn](int n) { return 4 * nn * n + 2 * nn; };
  const auto qrow = [nn](int n) { return 4 * nn * n + 3 * nn; };
  for (int n = 0; n < N; ++n) {
    // F1 rows
    mat.add_tridiag(blocks.A[n], urow(n), urow(n), 1.0);
    mat.add_tridiag(blocks.mass, urow(n), vrow(n), 1.0);
    mat.add_tridiag(blocks.B[n], urow(n), qrow(n), 1.0);
    if (n > 0) {
      mat.add_tridiag(blocks.A[n], urow(n), urow(n - 1), 1.0);
      mat.add_tridiag(blocks.mass, urow(n), vrow(n - 1), -1.0);
    }
    if (n < N - 1) mat.add_tridiag(blocks.B[n], urow(n), qrow(n + 1), 1.0);
    // F2 rows
    mat.add_tridiag(blocks.mass, vrow(n), urow(n), 1.0);
    mat.add_tridiag(blocks.mass, vrow(n), vrow(n), -0.5 * k);
    if (n > 0) {
      mat.add_tridiag(blocks.mass, vrow(n), urow(n - 1), -1.0);
      mat.add_tridiag(blocks.mass, vrow(n), vrow(n - 1), -0.5 * k);
    }
    // G1 rows
    mat.add_tridiag(blocks.mass, prow(n), prow(n), -0.5 * k);
    mat.add_tridiag(blocks.mass, prow(n), qrow(n), 1.0);
    if (n < N - 1) {
      mat.add_tridiag(blocks.mass, prow(n), prow(n + 1), -0.5 * k);
      mat.add_tridiag(blocks.mass, prow(n), qrow(n + 1), -1.0);
    }
    // G2 rows
    mat.add_tridiag(blocks.C[n], qrow(n), urow(n), 1.0);
    mat.add_tridiag(blocks.mass, qrow(n), prow(n), 1.0);
    mat.add_tridiag(blocks.A[n], qrow(n), qrow(n), 1.0);
    if (n > 0) mat.add_tridiag(blocks.C[n], qrow(n), urow(n - 1), 1.0);
    if (n < N - 1) {
      mat.add_tridiag(blocks.mass, qrow(n), prow(n + 1), -1.0);
      mat.add_tridiag(blocks.A[n], qrow(n), qrow(n + 1), 1.0);
    }
  }

  std::vector<double> b(blocks.dimension());
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      b[urow(n) + i] = rhs[n * nn + i];
      b[vrow(n) + i] = rhs[(N + n) * nn + i];
      b[prow(n) + i] = rhs[(2 * N + n) * nn + i];
      b[qrow(n) + i] = rhs[(3 * N + n) * nn + i];
    }
  }
  mat.solve(b);
  std::vector<double> x(blocks.dimension());
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      x[n * nn + i] = b[urow(n) + i];
      x[(N + n) * nn + i] = b[vrow(n) + i];
      x[(2 * N + n) * nn + i] = b[prow(n) + i];
      x[(3 * N + n) * nn + i] = b[qrow(n) + i];
    }
  }
  return x;
}

}  // namespace hamrec
