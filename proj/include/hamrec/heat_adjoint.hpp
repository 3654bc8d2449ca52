#pragma once

#include <vector>

#include "hamrec/fem1d.hpp"
#include "hamrec/regularization.hpp"

namespace hamrec {

/// Samples at the two boundary points over time levels 0..N.
struct BoundaryTrace {
  std::vector<double> left, right;

  static BoundaryTrace zeros(int n_levels) {
    return BoundaryTrace{std::vector<double>(n_levels, 0.0),
                         std::vector<double>(n_levels, 0.0)};
  }
  int n_levels() const { return static_cast<int>(left.size()); }
};

/// Which boundary points enter the misfit. Dropping one side removes its
/// term from the objective, the adjoint load and the Jacobian boundary
/// blocks alike.
struct ObservationMask {
  bool left = true;
  bool right = true;
};

/// State/adjoint pair over time levels 0..N. u[0] holds the (fixed)
/// initial state and q[N] the terminal adjoint value; the coupled scheme
/// determines the remaining levels.
struct HeatTrajectory {
  std::vector<NodalField> u, q;

  static HeatTrajectory zeros(int n_levels, int n_nodes);
  int n_steps() const { return static_cast<int>(u.size()) - 1; }
};

/// Backward-Euler forward solve: (M + k A(sigma)) u_{n+1} = M u_n + k b(j_{n+1})
/// with u_0 = 0. Throws if the coefficient is not strictly positive.
std::vector<NodalField> forward_heat_solve(const SpaceGrid& grid,
                                           const TimeGrid& tgrid,
                                           const ElementField& sigma,
                                           const BoundaryTrace& flux);

/// Same scheme with a separate coefficient per step (sigma_steps[n] is used
/// in the solve for level n+1).
std::vector<NodalField> forward_heat_solve_stepwise(
    const SpaceGrid& grid, const TimeGrid& tgrid,
    const std::vector<ElementField>& sigma_steps, const BoundaryTrace& flux);

/// Backward-Euler adjoint for a frozen coefficient:
/// (M + k A(sigma)) q_n = M q_{n+1} + 2k b((u - u*)_{n+1}) with q_N = 0.
std::vector<NodalField> backward_heat_adjoint_solve(
    const SpaceGrid& grid, const TimeGrid& tgrid, const ElementField& sigma,
    const std::vector<NodalField>& u, const BoundaryTrace& measurements,
    const ObservationMask& observe = {});

/// Coupled symplectic-backward-Euler residuals, n = 0..N-1:
///   F_n = M(u_{n+1}-u_n) + k A(h'(grad u_{n+1} . grad q_n)) u_{n+1} - k b(j_{n+1})
///   G_n = M(q_n-q_{n+1}) + k A(h'(grad u_{n+1} . grad q_n)) q_n - 2k b((u-u*)_{n+1})
NodalField heat_residual_F(int n, const HeatTrajectory& traj,
                           const BoundaryTrace& flux,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid);
NodalField heat_residual_G(int n, const HeatTrajectory& traj,
                           const BoundaryTrace& measurements,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid,
                           const ObservationMask& observe = {});

/// Newton blocks of the coupled system in the unknown ordering
/// [u_1..u_N | q_0..q_{N-1}]. K11 is lower block bidiagonal with M+S_n on
/// the diagonal and -M on the subdiagonal; the adjoint rows carry K11^T.
/// K12 and K21 are block diagonal and symmetric; K21 includes the -2k
/// boundary mass term on the observed sides.
struct HeatJacobianBlocks {
  int n_steps = 0;
  int n_nodes = 0;
  TridiagonalMatrix mass;
  std::vector<TridiagonalMatrix> K11_diag;
  std::vector<TridiagonalMatrix> K12_diag;
  std::vector<TridiagonalMatrix> K21_diag;

  int dimension() const { return 2 * n_steps * n_nodes; }
  /// y = J x on the stacked increment vector.
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

HeatJacobianBlocks assemble_heat_jacobian(const HeatTrajectory& traj,
                                          const RegularizedHamiltonian& reg,
                                          const SpaceGrid& grid,
                                          const TimeGrid& tgrid,
                                          const ObservationMask& observe = {});

/// Boundary misfit, rectangle rule with weight k on levels 1..N:
/// k sum_n sum_{observed ends} (u_n(end) - u*_n(end))^2.
double heat_objective(const std::vector<NodalField>& u,
                      const BoundaryTrace& measurements, const TimeGrid& tgrid,
                      const ObservationMask& observe = {});

/// Element products s_n(e) = (grad u_{n+1})_e (grad q_n)_e, n = 0..N-1 --
/// the same pairing the residuals use.
ElementTrace heat_gradient_products(const HeatTrajectory& traj,
                                    const SpaceGrid& grid);

/// Reconstructed control h'(s_n(e)) per step and element.
ElementTrace extract_control(const HeatTrajectory& traj,
                             const RegularizedHamiltonian& reg,
                             const SpaceGrid& grid);

// Stacked-vector layout [u_1..u_N | q_0..q_{N-1}], node index fastest.
std::vector<double> heat_pack(const HeatTrajectory& traj);
void heat_unpack(const std::vector<double>& x, HeatTrajectory& traj);

/// All residuals stacked as [F_0..F_{N-1} | G_0..G_{N-1}], matching the
/// unknown ordering of HeatJacobianBlocks::apply.
std::vector<double> heat_residual_stack(const HeatTrajectory& traj,
                                        const BoundaryTrace& flux,
                                        const BoundaryTrace& measurements,
                                        const RegularizedHamiltonian& reg,
                                        const SpaceGrid& grid,
                                        const TimeGrid& tgrid,
                                        const ObservationMask& observe = {});

}  // namespace hamrec
