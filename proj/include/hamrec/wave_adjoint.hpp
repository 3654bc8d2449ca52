#pragma once

#include <vector>

#include "hamrec/fem1d.hpp"
#include "hamrec/heat_adjoint.hpp"
#include "hamrec/regularization.hpp"

namespace hamrec {

/// Four-field trajectory of the first-order wave Hamiltonian system over
/// time levels 0..N. u[0] = v[0] = 0 and p[N] = q[N] = 0 hold the fixed
/// initial/terminal data.
struct WaveTrajectory {
  std::vector<NodalField> u, v, p, q;

  static WaveTrajectory zeros(int n_levels, int n_nodes);
  int n_steps() const { return static_cast<int>(u.size()) - 1; }
};

/// Explicit three-level scheme for data generation:
///   M(u_{n+1} - 2u_n + u_{n-1}) = k^2 (b(j_n) - A(sigma) u_n),
/// n = 1..N-1, from the two given start levels (default u_0 = u_1 = 0).
/// Enforces the CFL-type bound k <= 0.9 h / sqrt(max sigma) and throws if
/// any level exceeds blowup_threshold in magnitude.
std::vector<NodalField> forward_wave_solve(const SpaceGrid& grid,
                                           const TimeGrid& tgrid,
                                           const ElementField& sigma,
                                           const BoundaryTrace& flux,
                                           double blowup_threshold = 1e8);
std::vector<NodalField> forward_wave_solve_from(const SpaceGrid& grid,
                                                const TimeGrid& tgrid,
                                                const ElementField& sigma,
                                                const BoundaryTrace& flux,
                                                const NodalField& u0,
                                                const NodalField& u1,
                                                double blowup_threshold = 1e8);

/// Implicit midpoint stepping of the linear forward pair (u, v) for a
/// frozen coefficient; conserves the quadratic energy of wave_energy.
struct WaveForwardState {
  std::vector<NodalField> u, v;
};
WaveForwardState midpoint_wave_forward(const SpaceGrid& grid,
                                       const TimeGrid& tgrid,
                                       const ElementField& sigma,
                                       const BoundaryTrace& flux,
                                       const NodalField& u0,
                                       const NodalField& v0);

/// 0.5 (v' M v + u' A(sigma) u).
double wave_energy(const SpaceGrid& grid, const ElementField& sigma,
                   const NodalField& u, const NodalField& v);

/// Implicit-midpoint residuals of the four-field system, n = 0..N-1,
/// with x_{n+1/2} := (x_n + x_{n+1})/2 for all fields and for j, u*:
///   F1_n = M(v_{n+1}-v_n) + k A(h'(s)) u_{n+1/2} - k b(j_{n+1/2})
///   F2_n = M(u_{n+1}-u_n - k v_{n+1/2})
///   G1_n = M(q_n-q_{n+1} - k p_{n+1/2})
///   G2_n = M(p_n-p_{n+1}) + k A(h'(s)) q_{n+1/2} - 2k b((u-u*)_{n+1/2})
/// where s = grad u_{n+1/2} . grad q_{n+1/2} per element.
struct WaveResiduals {
  NodalField F1, F2, G1, G2;
};
WaveResiduals wave_midpoint_residuals(int n, const WaveTrajectory& traj,
                                      const BoundaryTrace& flux,
                                      const BoundaryTrace& measurements,
                                      const RegularizedHamiltonian& reg,
                                      const SpaceGrid& grid,
                                      const TimeGrid& tgrid,
                                      const ObservationMask& observe = {});

/// Newton blocks of the midpoint system in the unknown ordering
/// [u_1..u_N | v_1..v_N | p_0..p_{N-1} | q_0..q_{N-1}]. Per step n,
///   A[n] : the midpoint entry (k/2)(h'' s + h') stiffness -- K11/K44 blocks
///   B[n] : (k/2) h'' (grad u)^2 stiffness                 -- K14 blocks
///   C[n] : (k/2) h'' (grad q)^2 stiffness - k boundary mass -- K41 blocks
/// and the remaining blocks are mass bidiagonals (K12 = K21 = K34^T = K43^T,
/// K22 = K33^T = -k/2 mass bidiagonal).
struct WaveJacobianBlocks {
  int n_steps = 0;
  int n_nodes = 0;
  double k = 0.0;
  TridiagonalMatrix mass;
  std::vector<TridiagonalMatrix> A, B, C;

  int dimension() const { return 4 * n_steps * n_nodes; }
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

WaveJacobianBlocks assemble_wave_jacobian(const WaveTrajectory& traj,
                                          const RegularizedHamiltonian& reg,
                                          const SpaceGrid& grid,
                                          const TimeGrid& tgrid,
                                          const ObservationMask& observe = {});

/// One 2x2 blockwise Gauss-Seidel sweep from q^0 = 0: eliminates v via
/// K22 (mass solves only), forward-substitutes the (u,v) Schur pair in
/// time, then back-substitutes the (p,q) pair with K41 u on the right hand
/// side. Equals the exact solve of the 4x4 system with K14 = 0.
std::vector<double> wave_gs_preconditioner_apply(
    const WaveJacobianBlocks& blocks, const std::vector<double>& rhs);

/// Boundary misfit in the midpoint quadrature:
/// k sum_n sum_{observed ends} (u_{n+1/2}(end) - u*_{n+1/2}(end))^2.
double wave_objective(const std::vector<NodalField>& u,
                      const BoundaryTrace& measurements, const TimeGrid& tgrid,
                      const ObservationMask& observe = {});

/// s_n(e) = (grad u_{n+1/2})_e (grad q_{n+1/2})_e, n = 0..N-1.
ElementTrace wave_gradient_products(const WaveTrajectory& traj,
                                    const SpaceGrid& grid);

ElementTrace extract_control_wave(const WaveTrajectory& traj,
                                  const RegularizedHamiltonian& reg,
                                  const SpaceGrid& grid);

std::vector<double> wave_pack(const WaveTrajectory& traj);
void wave_unpack(const std::vector<double>& x, WaveTrajectory& traj);

/// Residuals stacked as [F1 | F2 | G1 | G2], each block step-major.
std::vector<double> wave_residual_stack(const WaveTrajectory& traj,
                                        const BoundaryTrace& flux,
                                        const BoundaryTrace& measurements,
                                        const RegularizedHamiltonian& reg,
                                        const SpaceGrid& grid,
                                        const TimeGrid& tgrid,
                                        const ObservationMask& observe = {});

}  // namespace hamrec
