#pragma once

#include <cstdint>
#include <vector>

#include "hamrec/heat_adjoint.hpp"
#include "hamrec/newton_krylov.hpp"
#include "hamrec/wave_adjoint.hpp"

namespace hamrec {

enum class Equation { heat, wave };
enum class LinearSolverKind { direct, gmres_gs };

/// Strictly decreasing sequence of regularization parameters; each stage is
/// warm-started from the previous solution.
struct ContinuationSchedule {
  std::vector<double> deltas;

  /// Geometric schedule from delta_start down to delta_end (inclusive).
  static ContinuationSchedule geometric(double delta_start, double delta_end,
                                        int stages);
  void validate() const;  // throws std::invalid_argument
};

/// Multiplicative measurement noise u* -> u* (1 + eta * e), e iid standard
/// normal from the seeded generator.
struct NoiseSpec {
  double eta = 0.0;
  std::uint64_t seed = 0;
};

struct ReconstructionProblem {
  Equation equation = Equation::heat;
  SpaceGrid space_grid;
  TimeGrid time_grid;
  ControlBounds bounds;
  ContinuationSchedule schedule;
  BoundaryTrace flux;
  BoundaryTrace measurements;
  NewtonConfig newton_cfg;
  KrylovConfig krylov_cfg;
  LinearSolverKind linear_solver = LinearSolverKind::direct;
  ObservationMask observe;

  void validate() const;  // throws std::invalid_argument
};

struct StageDiagnostics {
  double delta = 0.0;
  int newton_iters = 0;
  double final_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
};

struct ReconstructionResult {
  Equation equation = Equation::heat;
  HeatTrajectory heat;  // filled for the heat equation
  WaveTrajectory wave;  // filled for the wave equation
  ElementTrace sigma_tilde;
  std::vector<StageDiagnostics> stages;
  bool all_converged = false;
};

/// Twin-experiment data synthesis: forward solve on the (possibly finer)
/// data grids and extraction of the boundary trace.
BoundaryTrace synthesize_data(Equation equation, const SpaceGrid& data_grid,
                              const TimeGrid& data_tgrid,
                              const ElementField& sigma_true,
                              const BoundaryTrace& flux);

BoundaryTrace add_noise(const BoundaryTrace& trace, const NoiseSpec& spec);

/// Linear interpolation in time from a finer grid onto the target levels.
/// Throws if the target grid extends beyond the fine grid.
BoundaryTrace interpolate_trace(const BoundaryTrace& trace,
                                const TimeGrid& fine, const TimeGrid& target);

/// Damped Newton on the coupled system for each delta of the schedule,
/// warm-starting from the previous stage (the first stage from zero or the
/// provided trajectory). Non-converged stages are recorded in the
/// diagnostics and the continuation proceeds with the best iterate.
ReconstructionResult continuation_solve(const ReconstructionProblem& problem,
                                        const HeatTrajectory* heat_init = nullptr,
                                        const WaveTrajectory* wave_init = nullptr);

enum class AvgMethod { avg1, avg2, avg3 };

/// Time-independent coefficient from the gradient-product trace s_n(e):
///   avg1: h'(∫ s dt)
///   avg2: (1/T) ∫ h'(s) dt
///   avg3: ∫ h'(s)|s| dt / ∫ |s| dt, falling back to sigma_bar on elements
///         with vanishing denominator (indices reported via degenerate).
/// Time integrals use the rectangle rule on the trace's own pairing.
ElementField average_time_independent(const ElementTrace& grad_products,
                                      const TimeGrid& tgrid,
                                      const RegularizedHamiltonian& reg,
                                      AvgMethod method,
                                      std::vector<int>* degenerate = nullptr);
ElementField average_time_independent(const HeatTrajectory& traj,
                                      const RegularizedHamiltonian& reg,
                                      const SpaceGrid& grid,
                                      const TimeGrid& tgrid, AvgMethod method,
                                      std::vector<int>* degenerate = nullptr);

/// Space-independent coefficient per step: h'((1/|Omega|) ∫ s dx).
std::vector<double> average_space_independent(const ElementTrace& grad_products,
                                              const SpaceGrid& grid,
                                              const RegularizedHamiltonian& reg);

/// Constant coefficient h'((1/|Omega|) ∫∫ s dx dt); the normalization
/// carries no 1/T factor.
double average_constant(const ElementTrace& grad_products,
                        const SpaceGrid& grid, const TimeGrid& tgrid,
                        const RegularizedHamiltonian& reg);

/// Discrete value function of a converged heat trajectory: per step the
/// boundary misfit at level n+1 plus the correction
/// ∫ [h'(s) s - h_delta(s)] dx at s = grad u_{n+1} . grad q_n, all times k.
double discrete_value_heat(const HeatTrajectory& traj,
                           const BoundaryTrace& measurements,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid,
                           const ObservationMask& observe = {});

/// Midpoint analogue for a wave trajectory.
double discrete_value_wave(const WaveTrajectory& traj,
                           const BoundaryTrace& measurements,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid,
                           const ObservationMask& observe = {});

/// Solves the coupled heat system at the given delta with initial state
/// u_0 = phi0 (warm-started from `warm` when provided) and evaluates the
/// discrete value function. Heat only.
double discrete_value(const NodalField& phi0, double delta,
                      const ReconstructionProblem& problem,
                      const HeatTrajectory* warm = nullptr);

}  // namespace hamrec
