#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hamrec/heat_adjoint.hpp"
#include "hamrec/wave_adjoint.hpp"

namespace hamrec {

struct NewtonConfig {
  double residual_tol = 1e-8;  // max-norm of the stacked residual
  int max_iters = 50;
  bool backtracking = true;    // otherwise a fixed step length is used
  double alpha = 1.0;          // initial / fixed step length, in (0, 1]
  double backtracking_shrink = 0.5;
  double min_alpha = 1.0 / 1024.0;
};

struct KrylovConfig {
  double rel_tol = 1e-8;
  int max_iters = 500;
  int restart = 50;
};

/// Matrix-free linear operator: y = A x with x, y of size dimension.
struct LinearOperator {
  int dimension = 0;
  std::function<void(const std::vector<double>&, std::vector<double>&)> apply;
};

enum class GmresStatus { converged, max_iterations, breakdown };

struct GmresResult {
  std::vector<double> solution;
  int iterations = 0;
  double residual_norm = 0.0;
  GmresStatus status = GmresStatus::converged;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations,
/// right-preconditioned so the reported residual is the true residual:
/// solves A (P z) = b and returns x = P z. precond may be null. A zero
/// Arnoldi vector whose least-squares solution does not meet the tolerance
/// is reported as GmresStatus::breakdown, distinct from running out of
/// iterations.
GmresResult gmres_solve(const LinearOperator& op,
                        const std::vector<double>& rhs,
                        const LinearOperator* precond, const KrylovConfig& cfg,
                        std::vector<double>* residual_history = nullptr);

/// One blockwise Gauss-Seidel sweep from q^0 = 0 for the heat Newton
/// system: K11 u = f by forward substitution in time (one M+S_n solve per
/// step), then K11^T q = g - K21 u backward. Equals the exact solve of the
/// system with K12 = 0.
std::vector<double> heat_gs_preconditioner_apply(
    const HeatJacobianBlocks& blocks, const std::vector<double>& rhs);

/// Direct solve of the Newton system via LAPACK banded LU after
/// reordering the unknowns time-step-major ([u_{n+1}, q_n] pairs for heat,
/// [u_{n+1}, v_{n+1}, p_n, q_n] quadruples for the wave), which confines
/// the nonzeros to a band of width O(n_nodes). Input and output use the
/// field-major stacked layout of the block structures.
std::vector<double> banded_direct_solve(const HeatJacobianBlocks& blocks,
                                        const std::vector<double>& rhs);
std::vector<double> banded_direct_solve(const WaveJacobianBlocks& blocks,
                                        const std::vector<double>& rhs);

// band half-widths of the reordered systems, exposed for structure checks
inline int heat_band_halfwidth(int n_nodes) { return 2 * n_nodes + 1; }
inline int wave_band_halfwidth(int n_nodes) { return 7 * n_nodes + 1; }

struct NewtonResult {
  std::vector<double> solution;        // best iterate seen (final when converged)
  std::vector<double> residual_norms;  // max-norms, including the initial one
  int iterations = 0;
  bool converged = false;
  bool hit_min_alpha = false;  // some step was taken without descent
};

inline double max_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Damped Newton iteration on r(x) = 0. jacobian_fn evaluates whatever the
/// linear_solver needs at the current iterate; linear_solver returns the
/// Newton step s with J s = r, applied as x <- x - alpha s. With
/// backtracking, alpha shrinks until the residual max-norm decreases; if
/// min_alpha is reached the step is taken anyway and flagged.
template <class Jacobian>
NewtonResult damped_newton(
    const std::function<std::vector<double>(const std::vector<double>&)>&
        residual_fn,
    const std::function<Jacobian(const std::vector<double>&)>& jacobian_fn,
    const std::function<std::vector<double>(const Jacobian&,
                                            const std::vector<double>&)>&
        linear_solver,
    std::vector<double> x0, const NewtonConfig& cfg) {
  NewtonResult out;
  std::vector<double> x = std::move(x0);
  std::vector<double> r = residual_fn(x);
  double rnorm = max_norm(r);
  out.residual_norms.push_back(rnorm);
  out.solution = x;
  double best = rnorm;

  while (rnorm > cfg.residual_tol && out.iterations < cfg.max_iters) {
    const Jacobian jac = jacobian_fn(x);
    const std::vector<double> step = linear_solver(jac, r);
    double alpha = cfg.alpha;
    std::vector<double> x_try(x.size());
    std::vector<double> r_try;
    double rnorm_try = 0.0;
    while (true) {
      for (size_t i = 0; i < x.size(); ++i) x_try[i] = x[i] - alpha * step[i];
      r_try = residual_fn(x_try);
      rnorm_try = max_norm(r_try);
      if (!cfg.backtracking || rnorm_try < rnorm) break;
      if (alpha * cfg.backtracking_shrink < cfg.min_alpha) {
        out.hit_min_alpha = true;  // accept the non-descent step
        break;
      }
      alpha *= cfg.backtracking_shrink;
    }
    x.swap(x_try);
    r.swap(r_try);
    rnorm = rnorm_try;
    ++out.iterations;
    out.residual_norms.push_back(rnorm);
    if (rnorm < best) {
      best = rnorm;
      out.solution = x;
    }
  }
  out.converged = rnorm <= cfg.residual_tol;
  if (out.converged) out.solution = std::move(x);
  return out;
}

}  // namespace hamrec
