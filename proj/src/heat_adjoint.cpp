#include "hamrec/heat_adjoint.hpp"

#include <cassert>
#include <stdexcept>

namespace hamrec {

namespace {

void check_positive(const ElementField& sigma) {
  for (double s : sigma) {
    if (!(s > 0.0)) {
      throw std::runtime_error("forward_heat_solve: coefficient must be strictly positive");
    }
  }
}

NodalField misfit_load(const NodalField& u_level, const BoundaryTrace& meas,
                       int level, const SpaceGrid& grid,
                       const ObservationMask& observe) {
  const double dl = observe.left ? u_level.front() - meas.left[level] : 0.0;
  const double dr = observe.right ? u_level.back() - meas.right[level] : 0.0;
  return boundary_load(grid, dl, dr);
}

}  // namespace

HeatTrajectory HeatTrajectory::zeros(int n_levels, int n_nodes) {
  HeatTrajectory t;
  t.u.assign(n_levels, NodalField(n_nodes, 0.0));
  t.q.assign(n_levels, NodalField(n_nodes, 0.0));
  return t;
}

std::vector<NodalField> forward_heat_solve(const SpaceGrid& grid,
                                           const TimeGrid& tgrid,
                                           const ElementField& sigma,
                                           const BoundaryTrace& flux) {
  check_positive(sigma);
  assert(flux.n_levels() == tgrid.n_levels());
  const TridiagonalMatrix mass = assemble_mass(grid);
  TridiagonalMatrix system = mass;
  system.add_scaled(assemble_weighted_stiffness(grid, sigma), tgrid.k);

  std::vector<NodalField> u(tgrid.n_levels(), NodalField(grid.n_nodes(), 0.0));
  for (int n = 0; n < tgrid.n_steps; ++n) {
    NodalField rhs = mass.apply(u[n]);
    rhs[0] += tgrid.k * flux.left[n + 1];
    rhs[grid.n_elements] += tgrid.k * flux.right[n + 1];
    u[n + 1] = system.solve(rhs);
  }
  return u;
}

std::vector<NodalField> forward_heat_solve_stepwise(
    const SpaceGrid& grid, const TimeGrid& tgrid,
    const std::vector<ElementField>& sigma_steps, const BoundaryTrace& flux) {
  assert(static_cast<int>(sigma_steps.size()) == tgrid.n_steps);
  const TridiagonalMatrix mass = assemble_mass(grid);
  std::vector<NodalField> u(tgrid.n_levels(), NodalField(grid.n_nodes(), 0.0));
  for (int n = 0; n < tgrid.n_steps; ++n) {
    check_positive(sigma_steps[n]);
    TridiagonalMatrix system = mass;
    system.add_scaled(assemble_weighted_stiffness(grid, sigma_steps[n]),
                      tgrid.k);
    NodalField rhs = mass.apply(u[n]);
    rhs[0] += tgrid.k * flux.left[n + 1];
    rhs[grid.n_elements] += tgrid.k * flux.right[n + 1];
    u[n + 1] = system.solve(rhs);
  }
  return u;
}

std::vector<NodalField> backward_heat_adjoint_solve(
    const SpaceGrid& grid, const TimeGrid& tgrid, const ElementField& sigma,
    const std::vector<NodalField>& u, const BoundaryTrace& measurements,
    const ObservationMask& observe) {
  check_positive(sigma);
  const TridiagonalMatrix mass = assemble_mass(grid);
  TridiagonalMatrix system = mass;
  system.add_scaled(assemble_weighted_stiffness(grid, sigma), tgrid.k);

  std::vector<NodalField> q(tgrid.n_levels(), NodalField(grid.n_nodes(), 0.0));
  for (int n = tgrid.n_steps - 1; n >= 0; --n) {
    NodalField rhs = mass.apply(q[n + 1]);
    const NodalField load =
        misfit_load(u[n + 1], measurements, n + 1, grid, observe);
    for (int i = 0; i < grid.n_nodes(); ++i) {
      rhs[i] += 2.0 * tgrid.k * load[i];
    }
    q[n] = system.solve(rhs);
  }
  return q;
}

NodalField heat_residual_F(int n, const HeatTrajectory& traj,
                           const BoundaryTrace& flux,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid) {
  assert(n >= 0 && n < tgrid.n_steps);
  const ElementField gu = element_gradient(grid, traj.u[n + 1]);
  const ElementField gq = element_gradient(grid, traj.q[n]);
  ElementField coeff(grid.n_elements);
  for (int e = 0; e < grid.n_elements; ++e) {
    coeff[e] = reg.h_prime(gu[e] * gq[e]);
  }
  const TridiagonalMatrix stiff = assemble_weighted_stiffness(grid, coeff);
  const TridiagonalMatrix mass = assemble_mass(grid);

  NodalField r(grid.n_nodes(), 0.0);
  NodalField du(grid.n_nodes());
  for (int i = 0; i < grid.n_nodes(); ++i) du[i] = traj.u[n + 1][i] - traj.u[n][i];
  mass.apply(du.data(), r.data());
  stiff.apply_add(traj.u[n + 1].data(), r.data(), tgrid.k);
  r[0] -= tgrid.k * flux.left[n + 1];
  r[grid.n_elements] -= tgrid.k * flux.right[n + 1];
  return r;
}

NodalField heat_residual_G(int n, const HeatTrajectory& traj,
                           const BoundaryTrace& measurements,
                           const RegularizedHamiltonian& reg,
                           const SpaceGrid& grid, const TimeGrid& tgrid,
                           const ObservationMask& observe) {
  assert(n >= 0 && n < tgrid.n_steps);
  const ElementField gu = element_gradient(grid, traj.u[n + 1]);
  const ElementField gq = element_gradient(grid, traj.q[n]);
  ElementField coeff(grid.n_elements);
  for (int e = 0; e < grid.n_elements; ++e) {
    coeff[e] = reg.h_prime(gu[e] * gq[e]);
  }
  const TridiagonalMatrix stiff = assemble_weighted_stiffness(grid, coeff);
  const TridiagonalMatrix mass = assemble_mass(grid);

  NodalField r(grid.n_nodes(), 0.0);
  NodalField dq(grid.n_nodes());
  for (int i = 0; i < grid.n_nodes(); ++i) dq[i] = traj.q[n][i] - traj.q[n + 1][i];
  mass.apply(dq.data(), r.data());
  stiff.apply_add(traj.q[n].data(), r.data(), tgrid.k);
  const NodalField load =
      misfit_load(traj.u[n + 1], measurements, n + 1, grid, observe);
  for (int i = 0; i < grid.n_nodes(); ++i) {
    r[i] -= 2.0 * tgrid.k * load[i];
  }
  return r;
}

void HeatJacobianBlocks::apply(const std::vector<double>& x,
                               std::vector<double>& y) const {
  const int nn = n_nodes;
  const int N = n_steps;
  assert(static_cast<int>(x.size()) == dimension());
  y.assign(dimension(), 0.0);
  const double* xu = x.data();
  const double* xq = x.data() + N * nn;
  double* yu = y.data();
  double* yq = y.data() + N * nn;
  for (int n = 0; n < N; ++n) {
    // state rows: (M+S_n) u_n - M u_{n-1} + K12_n q_n
    K11_diag[n].apply(xu + n * nn, yu + n * nn);
    if (n > 0) mass.apply_add(xu + (n - 1) * nn, yu + n * nn, -1.0);
    K12_diag[n].apply_add(xq + n * nn, yu + n * nn, 1.0);
    // adjoint rows: K21_n u_n + (M+S_n)^T q_n - M q_{n+1}
    K11_diag[n].apply(xq + n * nn, yq + n * nn);
    if (n < N - 1) mass.apply_add(xq + (n + 1) * nn, yq + n * nn, -1.0);
    K21_diag[n].apply_add(xu + n * nn, yq + n * nn, 1.0);
  }
}

HeatJacobianBlocks assemble_heat_jacobian(const HeatTrajectory& traj,
                                          const RegularizedHamiltonian& reg,
                                          const SpaceGrid& grid,
                                          const TimeGrid& tgrid,
                                          const ObservationMask& observe) {
  HeatJacobianBlocks blocks;
  blocks.n_steps = tgrid.n_steps;
  blocks.n_nodes = grid.n_nodes();
  blocks.mass = assemble_mass(grid);
  const double k = tgrid.k;
  const int ne = grid.n_elements;

  ElementField c11(ne), c12(ne), c21(ne);
  for (int n = 0; n < tgrid.n_steps; ++n) {
    const ElementField gu = element_gradient(grid, traj.u[n + 1]);
    const ElementField gq = element_gradient(grid, traj.q[n]);
    for (int e = 0; e < ne; ++e) {
      const double s = gu[e] * gq[e];
      const double hp = reg.h_prime(s);
      const double hpp = reg.h_second(s);
      // in 1D the mixed (grad q . grad w)(grad u . grad wbar) term collapses
      // to a weighted stiffness with coefficient h'' * s
      c11[e] = k * (hp + hpp * s);
      c12[e] = k * hpp * gu[e] * gu[e];
      c21[e] = k * hpp * gq[e] * gq[e];
    }
    TridiagonalMatrix k11 = assemble_mass(grid);
    k11.add_scaled(assemble_weighted_stiffness(grid, c11), 1.0);
    blocks.K11_diag.push_back(std::move(k11));
    blocks.K12_diag.push_back(assemble_weighted_stiffness(grid, c12));
    TridiagonalMatrix k21 = assemble_weighted_stiffness(grid, c21);
    if (observe.left) k21.main.front() -= 2.0 * k;
    if (observe.right) k21.main.back() -= 2.0 * k;
    blocks.K21_diag.push_back(std::move(k21));
  }
  return blocks;
}

double heat_objective(const std::vector<NodalField>& u,
                      const BoundaryTrace& measurements, const TimeGrid& tgrid,
                      const ObservationMask& observe) {
  assert(static_cast<int>(u.size()) == tgrid.n_levels());
  double sum = 0.0;
  for (int n = 1; n <= tgrid.n_steps; ++n) {
    if (observe.left) {
      const double d = u[n].front() - measurements.left[n];
      sum += d * d;
    }
    if (observe.right) {
      const double d = u[n].back() - measurements.right[n];
      sum += d * d;
    }
  }
  return tgrid.k * sum;
}

ElementTrace heat_gradient_products(const HeatTrajectory& traj,
                                    const SpaceGrid& grid) {
  const int N = traj.n_steps();
  ElementTrace s(N, ElementField(grid.n_elements));
  for (int n = 0; n < N; ++n) {
    const ElementField gu = element_gradient(grid, traj.u[n + 1]);
    const ElementField gq = element_gradient(grid, traj.q[n]);
    for (int e = 0; e < grid.n_elements; ++e) s[n][e] = gu[e] * gq[e];
  }
  return s;
}

ElementTrace extract_control(const HeatTrajectory& traj,
                             const RegularizedHamiltonian& reg,
                             const SpaceGrid& grid) {
  ElementTrace sigma = heat_gradient_products(traj, grid);
  for (auto& step : sigma) {
    for (double& v : step) v = reg.h_prime(v);
  }
  return sigma;
}

std::vector<double> heat_pack(const HeatTrajectory& traj) {
  const int N = traj.n_steps();
  const int nn = static_cast<int>(traj.u[0].size());
  std::vector<double> x(2 * N * nn);
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      x[n * nn + i] = traj.u[n + 1][i];
      x[(N + n) * nn + i] = traj.q[n][i];
    }
  }
  return x;
}

void heat_unpack(const std::vector<double>& x, HeatTrajectory& traj) {
  const int N = traj.n_steps();
  const int nn = static_cast<int>(traj.u[0].size());
  assert(static_cast<int>(x.size()) == 2 * N * nn);
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      traj.u[n + 1][i] = x[n * nn + i];
      traj.q[n][i] = x[(N + n) * nn + i];
    }
  }
}

std::vector<double> heat_residual_stack(const HeatTrajectory& traj,
                                        const BoundaryTrace& flux,
                                        const BoundaryTrace& measurements,
                                        const RegularizedHamiltonian& reg,
                                        const SpaceGrid& grid,
                                        const TimeGrid& tgrid,
                                        const ObservationMask& observe) {
  const int N = tgrid.n_steps;
  const int nn = grid.n_nodes();
  std::vector<double> r(2 * N * nn);
  for (int n = 0; n < N; ++n) {
    const NodalField f = heat_residual_F(n, traj, flux, reg, grid, tgrid);
    const NodalField g =
        heat_residual_G(n, traj, measurements, reg, grid, tgrid, observe);
    for (int i = 0; i < nn; ++i) {
      r[n * nn + i] = f[i];
      r[(N + n) * nn + i] = g[i];
    }
  }
  return r;
}

}  // namespace hamrec
