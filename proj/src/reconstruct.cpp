#include "hamrec/reconstruct.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hamrec {

ContinuationSchedule ContinuationSchedule::geometric(double delta_start,
                                                     double delta_end,
                                                     int stages) {
  if (!(delta_start > 0.0) || !(delta_end > 0.0) || stages < 1 ||
      (stages > 1 && !(delta_end < delta_start))) {
    throw std::invalid_argument("ContinuationSchedule::geometric: bad parameters");
  }
  ContinuationSchedule s;
  if (stages == 1) {
    s.deltas = {delta_end};
    return s;
  }
  const double ratio = std::pow(delta_end / delta_start,
                                1.0 / static_cast<double>(stages - 1));
  s.deltas.resize(stages);
  for (int i = 0; i < stages; ++i) {
    s.deltas[i] = delta_start * std::pow(ratio, i);
  }
  s.deltas.back() = delta_end;
  return s;
}

void ContinuationSchedule::validate() const {
  if (deltas.empty()) {
    throw std::invalid_argument("ContinuationSchedule: empty schedule");
  }
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) {
      throw std::invalid_argument("ContinuationSchedule: deltas must be positive");
    }
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw std::invalid_argument("ContinuationSchedule: deltas must be strictly decreasing");
    }
  }
}

void ReconstructionProblem::validate() const {
  schedule.validate();
  if (flux.n_levels() != time_grid.n_levels() ||
      measurements.n_levels() != time_grid.n_levels()) {
    throw std::invalid_argument("ReconstructionProblem: trace lengths must match the time grid");
  }
}

BoundaryTrace synthesize_data(Equation equation, const SpaceGrid& data_grid,
                              const TimeGrid& data_tgrid,
                              const ElementField& sigma_true,
                              const BoundaryTrace& flux) {
  const std::vector<NodalField> u =
      equation == Equation::heat
          ? forward_heat_solve(data_grid, data_tgrid, sigma_true, flux)
          : forward_wave_solve(data_grid, data_tgrid, sigma_true, flux);
  BoundaryTrace trace = BoundaryTrace::zeros(data_tgrid.n_levels());
  for (int n = 0; n < data_tgrid.n_levels(); ++n) {
    trace.left[n] = u[n].front();
    trace.right[n] = u[n].back();
  }
  return trace;
}

BoundaryTrace add_noise(const BoundaryTrace& trace, const NoiseSpec& spec) {
  if (!(spec.eta >= 0.0)) {
    throw std::invalid_argument("add_noise: eta must be nonnegative");
  }
  BoundaryTrace out = trace;
  if (spec.eta == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : out.left) x *= 1.0 + spec.eta * normal(rng);
  for (double& x : out.right) x *= 1.0 + spec.eta * normal(rng);
  return out;
}

BoundaryTrace interpolate_trace(const BoundaryTrace& trace,
                                const TimeGrid& fine, const TimeGrid& target) {
  assert(trace.n_levels() == fine.n_levels());
  if (target.T > fine.T * (1.0 + 1e-12)) {
    throw std::invalid_argument("interpolate_trace: target grid extends beyond the data");
  }
  BoundaryTrace out = BoundaryTrace::zeros(target.n_levels());
  for (int n = 0; n < target.n_levels(); ++n) {
    const double t = std::min(target.times[n], fine.T);
    int i = static_cast<int>(std::floor(t / fine.k));
    i = std::clamp(i, 0, fine.n_steps - 1);
    const double w = (t - fine.times[i]) / fine.k;
    out.left[n] = (1.0 - w) * trace.left[i] + w * trace.left[i + 1];
    out.right[n] = (1.0 - w) * trace.right[i] + w * trace.right[i + 1];
  }
  return out;
}

namespace {

StageDiagnostics run_heat_stage(const ReconstructionProblem& P, double delta,
                                HeatTrajectory& traj) {
  const RegularizedHamiltonian reg(P.bounds, delta);
  const auto residual_fn = [&](const std::vector<double>& x) {
    HeatTrajectory t = traj;
    heat_unpack(x, t);
    return heat_residual_stack(t, P.flux, P.measurements, reg, P.space_grid,
                               P.time_grid, P.observe);
  };
  const auto jacobian_fn = [&](const std::vector<double>& x) {
    HeatTrajectory t = traj;
    heat_unpack(x, t);
    return assemble_heat_jacobian(t, reg, P.space_grid, P.time_grid,
                                  P.observe);
  };
  const auto solver = [&](const HeatJacobianBlocks& blocks,
                          const std::vector<double>& rhs) {
    if (P.linear_solver == LinearSolverKind::direct) {
      return banded_direct_solve(blocks, rhs);
    }
    LinearOperator op{blocks.dimension(),
                      [&blocks](const std::vector<double>& x,
                                std::vector<double>& y) { blocks.apply(x, y); }};
    LinearOperator precond{
        blocks.dimension(),
        [&blocks](const std::vector<double>& x, std::vector<double>& y) {
          y = heat_gs_preconditioner_apply(blocks, x);
        }};
    const GmresResult r = gmres_solve(op, rhs, &precond, P.krylov_cfg);
    if (r.status == GmresStatus::breakdown) {
      throw std::runtime_error("continuation_solve: GMRES breakdown in the Newton step");
    }
    return r.solution;
  };

  const NewtonResult nr = damped_newton<HeatJacobianBlocks>(
      residual_fn, jacobian_fn, solver, heat_pack(traj), P.newton_cfg);
  heat_unpack(nr.solution, traj);

  StageDiagnostics d;
  d.delta = delta;
  d.newton_iters = nr.iterations;
  d.final_residual = max_norm(residual_fn(nr.solution));
  d.objective = heat_objective(traj.u, P.measurements, P.time_grid, P.observe);
  d.converged = nr.converged;
  return d;
}

StageDiagnostics run_wave_stage(const ReconstructionProblem& P, double delta,
                                WaveTrajectory& traj) {
  const RegularizedHamiltonian reg(P.bounds, delta);
  const auto residual_fn = [&](const std::vector<double>& x) {
    WaveTrajectory t = traj;
    wave_unpack(x, t);
    return wave_residual_stack(t, P.flux, P.measurements, reg, P.space_grid,
                               P.time_grid, P.observe);
  };
  const auto jacobian_fn = [&](const std::vector<double>& x) {
    WaveTrajectory t = traj;
    wave_unpack(x, t);
    return assemble_wave_jacobian(t, reg, P.space_grid, P.time_grid,
                                  P.observe);
  };
  const auto solver = [&](const WaveJacobianBlocks& blocks,
                          const std::vector<double>& rhs) {
    if (P.linear_solver == LinearSolverKind::direct) {
      return banded_direct_solve(blocks, rhs);
    }
    LinearOperator op{blocks.dimension(),
                      [&blocks](const std::vector<double>& x,
                                std::vector<double>& y) { blocks.apply(x, y); }};
    LinearOperator precond{
        blocks.dimension(),
        [&blocks](const std::vector<double>& x, std::vector<double>& y) {
          y = wave_gs_preconditioner_apply(blocks, x);
        }};
    const GmresResult r = gmres_solve(op, rhs, &precond, P.krylov_cfg);
    if (r.status == GmresStatus::breakdown) {
      throw std::runtime_error("continuation_solve: GMRES breakdown in the Newton step");
    }
    return r.solution;
  };

  const NewtonResult nr = damped_newton<WaveJacobianBlocks>(
      residual_fn, jacobian_fn, solver, wave_pack(traj), P.newton_cfg);
  wave_unpack(nr.solution, traj);

  StageDiagnostics d;
  d.delta = delta;
  d.newton_iters = nr.iterations;
  d.final_residual = max_norm(residual_fn(nr.solution));
  d.objective = wave_objective(traj.u, P.measurements, P.time_grid, P.observe);
  d.converged = nr.converged;
  return d;
}

}  // namespace

ReconstructionResult continuation_solve(const ReconstructionProblem& problem,
                                        const HeatTrajectory* heat_init,
                                        const WaveTrajectory* wave_init) {
  problem.validate();
  ReconstructionResult out;
  out.equation = problem.equation;
  out.all_converged = true;

  const int n_levels = problem.time_grid.n_levels();
  const int nn = problem.space_grid.n_nodes();

  if (problem.equation == Equation::heat) {
    out.heat = heat_init ? *heat_init : HeatTrajectory::zeros(n_levels, nn);
    for (double delta : problem.schedule.deltas) {
      const StageDiagnostics d = run_heat_stage(problem, delta, out.heat);
      out.all_converged = out.all_converged && d.converged;
      out.stages.push_back(d);
    }
    const RegularizedHamiltonian reg(problem.bounds,
                                     problem.schedule.deltas.back());
    out.sigma_tilde = extract_control(out.heat, reg, problem.space_grid);
  } else {
    out.wave = wave_init ? *wave_init : WaveTrajectory::zeros(n_levels, nn);
    for (double delta : problem.schedule.deltas) {
      const StageDiagnostics d = run_wave_stage(problem, delta, out.wave);
      out.all_converged = out.all_converged && d.converged;
      out.stages.push_back(d);
    }
    const RegularizedHamiltonian reg(problem.bounds,
                                     problem.schedule.deltas.back());
    out.sigma_tilde = extract_control_wave(out.wave, reg, problem.space_grid);
  }
  return out;
}

ElementField average_time_independent(const ElementTrace& grad_products,
                                      const TimeGrid& tgrid,
                                      const RegularizedHamiltonian& reg,
                                      AvgMethod method,
                                      std::vector<int>* degenerate) {
  assert(static_cast<int>(grad_products.size()) == tgrid.n_steps);
  const int ne = static_cast<int>(grad_products.front().size());
  const double k = tgrid.k;
  ElementField out(ne, 0.0);
  if (degenerate) degenerate->clear();
  for (int e = 0; e < ne; ++e) {
    switch (method) {
      case AvgMethod::avg1: {
        double integral = 0.0;
        for (const auto& s : grad_products) integral += k * s[e];
        out[e] = reg.h_prime(integral);
        break;
      }
      case AvgMethod::avg2: {
        double integral = 0.0;
        for (const auto& s : grad_products) integral += k * reg.h_prime(s[e]);
        out[e] = integral / tgrid.T;
        break;
      }
      case AvgMethod::avg3: {
        double num = 0.0, den = 0.0;
        for (const auto& s : grad_products) {
          const double w = std::abs(s[e]);
          num += k * reg.h_prime(s[e]) * w;
          den += k * w;
        }
        if (den == 0.0) {
          out[e] = reg.bounds().sigma_bar;
          if (degenerate) degenerate->push_back(e);
        } else {
          out[e] = num / den;
        }
        break;
      }
    }
  }
  return out;
}

ElementField average_time_independent(const HeatTrajectory& traj,
                                      const RegularizedHamiltonian& reg,
                                      const SpaceGrid& grid,
                                      const TimeGrid& tgrid, AvgMethod method,
                                      std::vector<int>* degenerate) {
  return average_time_independent(heat_gradient_products(traj, grid), tgrid,
                                  reg, method, degenerate);
}

std::vector<double> average_space_independent(const ElementTrace& grad_products,
                                              const SpaceGrid& grid,
                                              const RegularizedHamiltonian& reg) {
  std::vector<double> out(grad_products.size());
  for (size_t n = 0; n < grad_products.size(); ++n) {
    double integral = 0.0;
    for (double s : grad_products[n]) integral += s * grid.h;
    out[n] = reg.h_prime(integral / grid.length());
  }
  return out;
}

double average_constant(const ElementTrace& grad_products,
                        const SpaceGrid& grid, const TimeGrid& tgrid,
                        const RegularizedHamiltonian& reg) {
  double integral = 0.0;
  for (const auto& step : grad_products) {
    for (double s : step) integral += s * grid.h * tgrid.k;
  }
  return reg.h_prime(integral / grid.length());
}

double discrete_value_heat(const HeatTrajectory& traj,
                           const BoundaryTrace& measurements,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid,
                           const ObservationMask& observe) {
  double value = heat_objective(traj.u, measurements, tgrid, observe);
  const ElementTrace s = heat_gradient_products(traj, grid);
  for (int n = 0; n < tgrid.n_steps; ++n) {
    double corr = 0.0;
    for (double se : s[n]) {
      corr += (reg.h_prime(se) * se - reg.h_delta(se)) * grid.h;
    }
    value += tgrid.k * corr;
  }
  return value;
}

double discrete_value_wave(const WaveTrajectory& traj,
                           const BoundaryTrace& measurements,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid,
                           const ObservationMask& observe) {
  double value = wave_objective(traj.u, measurements, tgrid, observe);
  const ElementTrace s = wave_gradient_products(traj, grid);
  for (int n = 0; n < tgrid.n_steps; ++n) {
    double corr = 0.0;
    for (double se : s[n]) {
      corr += (reg.h_prime(se) * se - reg.h_delta(se)) * grid.h;
    }
    value += tgrid.k * corr;
  }
  return value;
}

double discrete_value(const NodalField& phi0, double delta,
                      const ReconstructionProblem& problem,
                      const HeatTrajectory* warm) {
  if (problem.equation != Equation::heat) {
    throw std::invalid_argument("discrete_value: only the heat system supports a free initial state");
  }
  assert(static_cast<int>(phi0.size()) == problem.space_grid.n_nodes());
  ReconstructionProblem single = problem;
  single.schedule.deltas = {delta};
  HeatTrajectory init = warm ? *warm
                             : HeatTrajectory::zeros(problem.time_grid.n_levels(),
                                                     problem.space_grid.n_nodes());
  init.u[0] = phi0;
  const ReconstructionResult res = continuation_solve(single, &init);
  const RegularizedHamiltonian reg(problem.bounds, delta);
  return discrete_value_heat(res.heat, problem.measurements, reg,
                             problem.space_grid, problem.time_grid,
                             problem.observe);
}

}  // namespace hamrec
