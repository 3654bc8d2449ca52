#include "hamrec/wave_adjoint.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace hamrec {

namespace {

void check_cfl(const SpaceGrid& grid, const TimeGrid& tgrid,
               const ElementField& sigma) {
  double smax = 0.0;
  for (double s : sigma) {
    if (!(s > 0.0)) {
      throw std::runtime_error("forward_wave_solve: coefficient must be strictly positive");
    }
    smax = std::max(smax, s);
  }
  const double limit = 0.9 * grid.h / std::sqrt(smax);
  if (tgrid.k > limit) {
    throw std::runtime_error("forward_wave_solve: time step violates the stability bound k <= 0.9 h / sqrt(max sigma)");
  }
}

NodalField midpoint_misfit_load(const NodalField& u_mid,
                                const BoundaryTrace& meas, int n,
                                const SpaceGrid& grid,
                                const ObservationMask& observe) {
  const double ml = 0.5 * (meas.left[n] + meas.left[n + 1]);
  const double mr = 0.5 * (meas.right[n] + meas.right[n + 1]);
  const double dl = observe.left ? u_mid.front() - ml : 0.0;
  const double dr = observe.right ? u_mid.back() - mr : 0.0;
  return boundary_load(grid, dl, dr);
}

NodalField midpoint(const NodalField& a, const NodalField& b) {
  NodalField m(a.size());
  for (size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  return m;
}

}  // namespace

WaveTrajectory WaveTrajectory::zeros(int n_levels, int n_nodes) {
  WaveTrajectory t;
  t.u.assign(n_levels, NodalField(n_nodes, 0.0));
  t.v.assign(n_levels, NodalField(n_nodes, 0.0));
  t.p.assign(n_levels, NodalField(n_nodes, 0.0));
  t.q.assign(n_levels, NodalField(n_nodes, 0.0));
  return t;
}

std::vector<NodalField> forward_wave_solve(const SpaceGrid& grid,
                                           const TimeGrid& tgrid,
                                           const ElementField& sigma,
                                           const BoundaryTrace& flux,
                                           double blowup_threshold) {
  const NodalField zero(grid.n_nodes(), 0.0);
  return forward_wave_solve_from(grid, tgrid, sigma, flux, zero, zero,
                                 blowup_threshold);
}

std::vector<NodalField> forward_wave_solve_from(const SpaceGrid& grid,
                                                const TimeGrid& tgrid,
                                                const ElementField& sigma,
                                                const BoundaryTrace& flux,
                                                const NodalField& u0,
                                                const NodalField& u1,
                                                double blowup_threshold) {
  check_cfl(grid, tgrid, sigma);
  assert(flux.n_levels() == tgrid.n_levels());
  const TridiagonalMatrix mass = assemble_mass(grid);
  const TridiagonalMatrix stiff = assemble_weighted_stiffness(grid, sigma);
  const double k2 = tgrid.k * tgrid.k;

  std::vector<NodalField> u(tgrid.n_levels(), NodalField(grid.n_nodes(), 0.0));
  u[0] = u0;
  if (tgrid.n_steps >= 1) u[1] = u1;
  for (int n = 1; n < tgrid.n_steps; ++n) {
    NodalField rhs(grid.n_nodes(), 0.0);
    stiff.apply_add(u[n].data(), rhs.data(), -k2);
    rhs[0] += k2 * flux.left[n];
    rhs[grid.n_elements] += k2 * flux.right[n];
    NodalField w = mass.solve(rhs);
    for (int i = 0; i < grid.n_nodes(); ++i) {
      w[i] += 2.0 * u[n][i] - u[n - 1][i];
      if (std::abs(w[i]) > blowup_threshold) {
        throw std::runtime_error("forward_wave_solve: solution blow-up, scheme unstable");
      }
    }
    u[n + 1] = std::move(w);
  }
  return u;
}

WaveForwardState midpoint_wave_forward(const SpaceGrid& grid,
                                       const TimeGrid& tgrid,
                                       const ElementField& sigma,
                                       const BoundaryTrace& flux,
                                       const NodalField& u0,
                                       const NodalField& v0) {
  const TridiagonalMatrix mass = assemble_mass(grid);
  const TridiagonalMatrix stiff = assemble_weighted_stiffness(grid, sigma);
  const double k = tgrid.k;
  // eliminate u_{n+1} = u_n + (k/2)(v_n + v_{n+1}):
  // (M + k^2/4 A) v_{n+1} = M v_n - k A u_n - k^2/4 A v_n + k b(j_{n+1/2})
  TridiagonalMatrix system = mass;
  system.add_scaled(stiff, 0.25 * k * k);

  WaveForwardState s;
  s.u.assign(tgrid.n_levels(), NodalField(grid.n_nodes(), 0.0));
  s.v.assign(tgrid.n_levels(), NodalField(grid.n_nodes(), 0.0));
  s.u[0] = u0;
  s.v[0] = v0;
  for (int n = 0; n < tgrid.n_steps; ++n) {
    NodalField rhs = mass.apply(s.v[n]);
    stiff.apply_add(s.u[n].data(), rhs.data(), -k);
    stiff.apply_add(s.v[n].data(), rhs.data(), -0.25 * k * k);
    const double jl = 0.5 * (flux.left[n] + flux.left[n + 1]);
    const double jr = 0.5 * (flux.right[n] + flux.right[n + 1]);
    rhs[0] += k * jl;
    rhs[grid.n_elements] += k * jr;
    s.v[n + 1] = system.solve(rhs);
    for (int i = 0; i < grid.n_nodes(); ++i) {
      s.u[n + 1][i] = s.u[n][i] + 0.5 * k * (s.v[n][i] + s.v[n + 1][i]);
    }
  }
  return s;
}

double wave_energy(const SpaceGrid& grid, const ElementField& sigma,
                   const NodalField& u, const NodalField& v) {
  const TridiagonalMatrix mass = assemble_mass(grid);
  const TridiagonalMatrix stiff = assemble_weighted_stiffness(grid, sigma);
  const NodalField mv = mass.apply(v);
  const NodalField au = stiff.apply(u);
  double e = 0.0;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    e += v[i] * mv[i] + u[i] * au[i];
  }
  return 0.5 * e;
}

WaveResiduals wave_midpoint_residuals(int n, const WaveTrajectory& traj,
                                      const BoundaryTrace& flux,
                                      const BoundaryTrace& measurements,
                                      const RegularizedHamiltonian& reg,
                                      const SpaceGrid& grid,
                                      const TimeGrid& tgrid,
                                      const ObservationMask& observe) {
  assert(n >= 0 && n < tgrid.n_steps);
  const int nn = grid.n_nodes();
  const double k = tgrid.k;
  const TridiagonalMatrix mass = assemble_mass(grid);

  const NodalField um = midpoint(traj.u[n], traj.u[n + 1]);
  const NodalField vm = midpoint(traj.v[n], traj.v[n + 1]);
  const NodalField pm = midpoint(traj.p[n], traj.p[n + 1]);
  const NodalField qm = midpoint(traj.q[n], traj.q[n + 1]);

  const ElementField gu = element_gradient(grid, um);
  const ElementField gq = element_gradient(grid, qm);
  ElementField coeff(grid.n_elements);
  for (int e = 0; e < grid.n_elements; ++e) {
    coeff[e] = reg.h_prime(gu[e] * gq[e]);
  }
  const TridiagonalMatrix stiff = assemble_weighted_stiffness(grid, coeff);

  WaveResiduals r;
  r.F1.assign(nn, 0.0);
  r.F2.assign(nn, 0.0);
  r.G1.assign(nn, 0.0);
  r.G2.assign(nn, 0.0);

  NodalField tmp(nn);
  for (int i = 0; i < nn; ++i) tmp[i] = traj.v[n + 1][i] - traj.v[n][i];
  mass.apply(tmp.data(), r.F1.data());
  stiff.apply_add(um.data(), r.F1.data(), k);
  r.F1[0] -= k * 0.5 * (flux.left[n] + flux.left[n + 1]);
  r.F1[nn - 1] -= k * 0.5 * (flux.right[n] + flux.right[n + 1]);

  for (int i = 0; i < nn; ++i) {
    tmp[i] = traj.u[n + 1][i] - traj.u[n][i] - k * vm[i];
  }
  mass.apply(tmp.data(), r.F2.data());

  for (int i = 0; i < nn; ++i) {
    tmp[i] = traj.q[n][i] - traj.q[n + 1][i] - k * pm[i];
  }
  mass.apply(tmp.data(), r.G1.data());

  for (int i = 0; i < nn; ++i) tmp[i] = traj.p[n][i] - traj.p[n + 1][i];
  mass.apply(tmp.data(), r.G2.data());
  stiff.apply_add(qm.data(), r.G2.data(), k);
  const NodalField load = midpoint_misfit_load(um, measurements, n, grid, observe);
  for (int i = 0; i < nn; ++i) r.G2[i] -= 2.0 * k * load[i];
  return r;
}

void WaveJacobianBlocks::apply(const std::vector<double>& x,
                               std::vector<double>& y) const {
  const int nn = n_nodes;
  const int N = n_steps;
  assert(static_cast<int>(x.size()) == dimension());
  y.assign(dimension(), 0.0);
  const double* xu = x.data();
  const double* xv = x.data() + N * nn;
  const double* xp = x.data() + 2 * N * nn;
  const double* xq = x.data() + 3 * N * nn;
  double* y1 = y.data();
  double* y2 = y.data() + N * nn;
  double* y3 = y.data() + 2 * N * nn;
  double* y4 = y.data() + 3 * N * nn;
  const double half_k = 0.5 * k;
  for (int n = 0; n < N; ++n) {
    // F1 rows: A_n(u_n + u_{n-1}) + M(v_n - v_{n-1}) + B_n(q_n + q_{n+1})
    A[n].apply(xu + n * nn, y1 + n * nn);
    mass.apply_add(xv + n * nn, y1 + n * nn, 1.0);
    B[n].apply_add(xq + n * nn, y1 + n * nn, 1.0);
    if (n > 0) {
      A[n].apply_add(xu + (n - 1) * nn, y1 + n * nn, 1.0);
      mass.apply_add(xv + (n - 1) * nn, y1 + n * nn, -1.0);
    }
    if (n < N - 1) B[n].apply_add(xq + (n + 1) * nn, y1 + n * nn, 1.0);

    // F2 rows: M(u_n - u_{n-1}) - (k/2) M (v_n + v_{n-1})
    mass.apply(xu + n * nn, y2 + n * nn);
    mass.apply_add(xv + n * nn, y2 + n * nn, -half_k);
    if (n > 0) {
      mass.apply_add(xu + (n - 1) * nn, y2 + n * nn, -1.0);
      mass.apply_add(xv + (n - 1) * nn, y2 + n * nn, -half_k);
    }

    // G1 rows: -(k/2) M (p_n + p_{n+1}) + M(q_n - q_{n+1})
    mass.apply(xq + n * nn, y3 + n * nn);
    mass.apply_add(xp + n * nn, y3 + n * nn, -half_k);
    if (n < N - 1) {
      mass.apply_add(xq + (n + 1) * nn, y3 + n * nn, -1.0);
      mass.apply_add(xp + (n + 1) * nn, y3 + n * nn, -half_k);
    }

    // G2 rows: C_n(u_n + u_{n-1}) + M(p_n - p_{n+1}) + A_n(q_n + q_{n+1})
    C[n].apply(xu + n * nn, y4 + n * nn);
    mass.apply_add(xp + n * nn, y4 + n * nn, 1.0);
    A[n].apply_add(xq + n * nn, y4 + n * nn, 1.0);
    if (n > 0) C[n].apply_add(xu + (n - 1) * nn, y4 + n * nn, 1.0);
    if (n < N - 1) {
      mass.apply_add(xp + (n + 1) * nn, y4 + n * nn, -1.0);
      A[n].apply_add(xq + (n + 1) * nn, y4 + n * nn, 1.0);
    }
  }
}

WaveJacobianBlocks assemble_wave_jacobian(const WaveTrajectory& traj,
                                          const RegularizedHamiltonian& reg,
                                          const SpaceGrid& grid,
                                          const TimeGrid& tgrid,
                                          const ObservationMask& observe) {
  WaveJacobianBlocks blocks;
  blocks.n_steps = tgrid.n_steps;
  blocks.n_nodes = grid.n_nodes();
  blocks.k = tgrid.k;
  blocks.mass = assemble_mass(grid);
  const double k = tgrid.k;
  const int ne = grid.n_elements;

  ElementField ca(ne), cb(ne), cc(ne);
  for (int n = 0; n < tgrid.n_steps; ++n) {
    const ElementField gu =
        element_gradient(grid, midpoint(traj.u[n], traj.u[n + 1]));
    const ElementField gq =
        element_gradient(grid, midpoint(traj.q[n], traj.q[n + 1]));
    for (int e = 0; e < ne; ++e) {
      const double s = gu[e] * gq[e];
      const double hp = reg.h_prime(s);
      const double hpp = reg.h_second(s);
      ca[e] = 0.5 * k * (hp + hpp * s);
      cb[e] = 0.5 * k * hpp * gu[e] * gu[e];
      cc[e] = 0.5 * k * hpp * gq[e] * gq[e];
    }
    blocks.A.push_back(assemble_weighted_stiffness(grid, ca));
    blocks.B.push_back(assemble_weighted_stiffness(grid, cb));
    TridiagonalMatrix c = assemble_weighted_stiffness(grid, cc);
    if (observe.left) c.main.front() -= k;
    if (observe.right) c.main.back() -= k;
    blocks.C.push_back(std::move(c));
  }
  return blocks;
}

std::vector<double> wave_gs_preconditioner_apply(
    const WaveJacobianBlocks& blocks, const std::vector<double>& rhs) {
  const int nn = blocks.n_nodes;
  const int N = blocks.n_steps;
  assert(static_cast<int>(rhs.size()) == blocks.dimension());
  const double k = blocks.k;
  const double* f1 = rhs.data();
  const double* f2 = rhs.data() + N * nn;
  const double* g1 = rhs.data() + 2 * N * nn;
  const double* g2 = rhs.data() + 3 * N * nn;

  std::vector<double> out(blocks.dimension(), 0.0);
  double* xu = out.data();
  double* xv = out.data() + N * nn;
  double* xp = out.data() + 2 * N * nn;
  double* xq = out.data() + 3 * N * nn;

  const NodalField zero(nn, 0.0);

  // forward substitution for the (u, v) pair; eliminating v needs only
  // mass solves, one (M + k/2 A_n) solve per step
  for (int n = 0; n < N; ++n) {
    const double* uprev = n > 0 ? xu + (n - 1) * nn : zero.data();
    const double* vprev = n > 0 ? xv + (n - 1) * nn : zero.data();
    TridiagonalMatrix system = blocks.mass;
    system.add_scaled(blocks.A[n], 0.5 * k);

    NodalField f2n(f2 + n * nn, f2 + (n + 1) * nn);
    const NodalField w = blocks.mass.solve(f2n);  // M^{-1} f2_n

    NodalField rhs_v(nn, 0.0);
    for (int i = 0; i < nn; ++i) rhs_v[i] = f1[n * nn + i];
    blocks.A[n].apply_add(w.data(), rhs_v.data(), -1.0);
    blocks.A[n].apply_add(uprev, rhs_v.data(), -2.0);
    blocks.A[n].apply_add(vprev, rhs_v.data(), -0.5 * k);
    blocks.mass.apply_add(vprev, rhs_v.data(), 1.0);
    const NodalField vn = system.solve(rhs_v);
    for (int i = 0; i < nn; ++i) {
      xv[n * nn + i] = vn[i];
      xu[n * nn + i] = w[i] + uprev[i] + 0.5 * k * (vn[i] + vprev[i]);
    }
  }

  // backward substitution for the (p, q) pair with K41 u on the rhs
  for (int n = N - 1; n >= 0; --n) {
    const double* pnext = n < N - 1 ? xp + (n + 1) * nn : zero.data();
    const double* qnext = n < N - 1 ? xq + (n + 1) * nn : zero.data();
    const double* un = xu + n * nn;
    const double* uprev = n > 0 ? xu + (n - 1) * nn : zero.data();
    TridiagonalMatrix system = blocks.mass;
    system.add_scaled(blocks.A[n], 0.5 * k);

    NodalField g1n(g1 + n * nn, g1 + (n + 1) * nn);
    const NodalField z = blocks.mass.solve(g1n);  // M^{-1} g1_n

    NodalField rhs_p(nn, 0.0);
    for (int i = 0; i < nn; ++i) rhs_p[i] = g2[n * nn + i];
    blocks.C[n].apply_add(un, rhs_p.data(), -1.0);
    blocks.C[n].apply_add(uprev, rhs_p.data(), -1.0);
    blocks.A[n].apply_add(z.data(), rhs_p.data(), -1.0);
    blocks.A[n].apply_add(qnext, rhs_p.data(), -2.0);
    blocks.A[n].apply_add(pnext, rhs_p.data(), -0.5 * k);
    blocks.mass.apply_add(pnext, rhs_p.data(), 1.0);
    const NodalField pn = system.solve(rhs_p);
    for (int i = 0; i < nn; ++i) {
      xp[n * nn + i] = pn[i];
      xq[n * nn + i] = z[i] + qnext[i] + 0.5 * k * (pn[i] + pnext[i]);
    }
  }
  return out;
}

double wave_objective(const std::vector<NodalField>& u,
                      const BoundaryTrace& measurements, const TimeGrid& tgrid,
                      const ObservationMask& observe) {
  double sum = 0.0;
  for (int n = 0; n < tgrid.n_steps; ++n) {
    if (observe.left) {
      const double d = 0.5 * (u[n].front() + u[n + 1].front()) -
                       0.5 * (measurements.left[n] + measurements.left[n + 1]);
      sum += d * d;
    }
    if (observe.right) {
      const double d = 0.5 * (u[n].back() + u[n + 1].back()) -
                       0.5 * (measurements.right[n] + measurements.right[n + 1]);
      sum += d * d;
    }
  }
  return tgrid.k * sum;
}

ElementTrace wave_gradient_products(const WaveTrajectory& traj,
                                    const SpaceGrid& grid) {
  const int N = traj.n_steps();
  ElementTrace s(N, ElementField(grid.n_elements));
  for (int n = 0; n < N; ++n) {
    const ElementField gu =
        element_gradient(grid, midpoint(traj.u[n], traj.u[n + 1]));
    const ElementField gq =
        element_gradient(grid, midpoint(traj.q[n], traj.q[n + 1]));
    for (int e = 0; e < grid.n_elements; ++e) s[n][e] = gu[e] * gq[e];
  }
  return s;
}

ElementTrace extract_control_wave(const WaveTrajectory& traj,
                                  const RegularizedHamiltonian& reg,
                                  const SpaceGrid& grid) {
  ElementTrace sigma = wave_gradient_products(traj, grid);
  for (auto& step : sigma) {
    for (double& v : step) v = reg.h_prime(v);
  }
  return sigma;
}

std::vector<double> wave_pack(const WaveTrajectory& traj) {
  const int N = traj.n_steps();
  const int nn = static_cast<int>(traj.u[0].size());
  std::vector<double> x(4 * N * nn);
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      x[n * nn + i] = traj.u[n + 1][i];
      x[(N + n) * nn + i] = traj.v[n + 1][i];
      x[(2 * N + n) * nn + i] = traj.p[n][i];
      x[(3 * N + n) * nn + i] = traj.q[n][i];
    }
  }
  return x;
}

void wave_unpack(const std::vector<double>& x, WaveTrajectory& traj) {
  const int N = traj.n_steps();
  const int nn = static_cast<int>(traj.u[0].size());
  assert(static_cast<int>(x.size()) == 4 * N * nn);
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < nn; ++i) {
      traj.u[n + 1][i] = x[n * nn + i];
      traj.v[n + 1][i] = x[(N + n) * nn + i];
      traj.p[n][i] = x[(2 * N + n) * nn + i];
      traj.q[n][i] = x[(3 * N + n) * nn + i];
    }
  }
}

std::vector<double> wave_residual_stack(const WaveTrajectory& traj,
                                        const BoundaryTrace& flux,
                                        const BoundaryTrace& measurements,
                                        const RegularizedHamiltonian& reg,
                                        const SpaceGrid& grid,
                                        const TimeGrid& tgrid,
                                        const ObservationMask& observe) {
  const int N = tgrid.n_steps;
  const int nn = grid.n_nodes();
  std::vector<double> r(4 * N * nn);
  for (int n = 0; n < N; ++n) {
    const WaveResiduals res = wave_midpoint_residuals(
        n, traj, flux, measurements, reg, grid, tgrid, observe);
    for (int i = 0; i < nn; ++i) {
      r[n * nn + i] = res.F1[i];
      r[(N + n) * nn + i] = res.F2[i];
      r[(2 * N + n) * nn + i] = res.G1[i];
      r[(3 * N + n) * nn + i] = res.G2[i];
    }
  }
  return r;
}

}  // namespace hamrec
