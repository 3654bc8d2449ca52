#include "hamrec/fem1d.hpp"

#include <lapacke.h>

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hamrec {

SpaceGrid SpaceGrid::uniform(double a, double b, int n_elements) {
  if (!(a < b) || n_elements < 1) {
    throw std::invalid_argument("SpaceGrid::uniform: need a < b and at least one element");
  }
  SpaceGrid g;
  g.a = a;
  g.b = b;
  g.n_elements = n_elements;
  g.h = (b - a) / n_elements;
  g.node_coords.resize(n_elements + 1);
  for (int i = 0; i <= n_elements; ++i) {
    g.node_coords[i] = a + i * g.h;
  }
  g.node_coords.back() = b;
  return g;
}

TimeGrid TimeGrid::uniform(double T, int n_steps) {
  if (!(T > 0.0) || n_steps < 1) {
    throw std::invalid_argument("TimeGrid::uniform: need T > 0 and at least one step");
  }
  TimeGrid g;
  g.T = T;
  g.n_steps = n_steps;
  g.k = T / n_steps;
  g.times.resize(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) {
    g.times[i] = g.k * i;
  }
  return g;
}

TridiagonalMatrix TridiagonalMatrix::zero(int n) {
  TridiagonalMatrix m;
  m.n = n;
  m.main.assign(n, 0.0);
  m.lower.assign(n > 0 ? n - 1 : 0, 0.0);
  m.upper.assign(n > 0 ? n - 1 : 0, 0.0);
  return m;
}

void TridiagonalMatrix::apply(const double* x, double* y) const {
  for (int i = 0; i < n; ++i) {
    double s = main[i] * x[i];
    if (i > 0) s += lower[i - 1] * x[i - 1];
    if (i < n - 1) s += upper[i] * x[i + 1];
    y[i] = s;
  }
}

void TridiagonalMatrix::apply_add(const double* x, double* y, double s) const {
  for (int i = 0; i < n; ++i) {
    double v = main[i] * x[i];
    if (i > 0) v += lower[i - 1] * x[i - 1];
    if (i < n - 1) v += upper[i] * x[i + 1];
    y[i] += s * v;
  }
}

NodalField TridiagonalMatrix::apply(const NodalField& x) const {
  assert(static_cast<int>(x.size()) == n);
  NodalField y(n);
  apply(x.data(), y.data());
  return y;
}

NodalField TridiagonalMatrix::solve(const NodalField& rhs) const {
  assert(static_cast<int>(rhs.size()) == n);
  std::vector<double> dl = lower, d = main, du = upper;
  NodalField x = rhs;
  lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(),
                                  du.data(), x.data(), n);
  if (info != 0) {
    throw std::runtime_error("tridiagonal solve: singular pivot at row " +
                             std::to_string(info));
  }
  return x;
}

void TridiagonalMatrix::add_scaled(const TridiagonalMatrix& other, double s) {
  assert(other.n == n);
  for (int i = 0; i < n; ++i) main[i] += s * other.main[i];
  for (int i = 0; i + 1 < n; ++i) {
    lower[i] += s * other.lower[i];
    upper[i] += s * other.upper[i];
  }
}

bool TridiagonalMatrix::symmetric() const {
  for (int i = 0; i + 1 < n; ++i) {
    if (lower[i] != upper[i]) return false;
  }
  return true;
}

TridiagonalMatrix assemble_mass(const SpaceGrid& grid) {
  const int nn = grid.n_nodes();
  const double h = grid.h;
  TridiagonalMatrix m = TridiagonalMatrix::zero(nn);
  for (int e = 0; e < grid.n_elements; ++e) {
    // element mass (h/6)·[[2,1],[1,2]]
    m.main[e] += h / 3.0;
    m.main[e + 1] += h / 3.0;
    m.lower[e] += h / 6.0;
    m.upper[e] += h / 6.0;
  }
  return m;
}

TridiagonalMatrix assemble_weighted_stiffness(const SpaceGrid& grid,
                                              const ElementField& coeff) {
  assert(static_cast<int>(coeff.size()) == grid.n_elements);
  const int nn = grid.n_nodes();
  TridiagonalMatrix a = TridiagonalMatrix::zero(nn);
  for (int e = 0; e < grid.n_elements; ++e) {
    const double c = coeff[e] / grid.h;
    a.main[e] += c;
    a.main[e + 1] += c;
    a.lower[e] -= c;
    a.upper[e] -= c;
  }
  return a;
}

ElementField element_gradient(const SpaceGrid& grid, const NodalField& field) {
  assert(static_cast<int>(field.size()) == grid.n_nodes());
  ElementField g(grid.n_elements);
  for (int e = 0; e < grid.n_elements; ++e) {
    g[e] = (field[e + 1] - field[e]) / grid.h;
  }
  return g;
}

NodalField boundary_load(const SpaceGrid& grid, double left_value,
                         double right_value) {
  NodalField f(grid.n_nodes(), 0.0);
  f.front() = left_value;
  f.back() = right_value;
  return f;
}

}  // namespace hamrec
