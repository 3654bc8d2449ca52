#pragma once

#include <vector>

namespace hamrec {

using NodalField = std::vector<double>;    // one value per grid node
using ElementField = std::vector<double>;  // one value per element (piecewise constant)

// One ElementField per time step; entry [n] belongs to step n of the scheme
// that produced it (backward-Euler pairing for heat, midpoint for wave).
using ElementTrace = std::vector<ElementField>;

/// Uniform partition of [a, b] into n_elements intervals with piecewise
/// linear hat functions on the nodes.
struct SpaceGrid {
  double a = 0.0;
  double b = 1.0;
  int n_elements = 0;
  double h = 0.0;
  std::vector<double> node_coords;

  static SpaceGrid uniform(double a, double b, int n_elements);

  int n_nodes() const { return n_elements + 1; }
  double length() const { return b - a; }
  double element_center(int e) const { return a + (e + 0.5) * h; }
};

/// Uniform partition {t_i = k*i, i=0..N} of [0, T].
struct TimeGrid {
  double T = 0.0;
  int n_steps = 0;
  double k = 0.0;
  std::vector<double> times;

  static TimeGrid uniform(double T, int n_steps);

  int n_levels() const { return n_steps + 1; }
};

/// Tridiagonal matrix stored by diagonals. lower/upper hold n-1 entries.
struct TridiagonalMatrix {
  int n = 0;
  std::vector<double> lower, main, upper;

  static TridiagonalMatrix zero(int n);

  // y = A x (raw pointers so callers can address slices of stacked vectors)
  void apply(const double* x, double* y) const;
  // y += s * A x
  void apply_add(const double* x, double* y, double s) const;
  NodalField apply(const NodalField& x) const;

  /// Solves A x = rhs by LU with partial pivoting (LAPACK dgtsv).
  /// Throws std::runtime_error on a singular pivot.
  NodalField solve(const NodalField& rhs) const;

  void add_scaled(const TridiagonalMatrix& other, double s);
  bool symmetric() const;  // lower == upper entrywise, exact
};

/// Mass matrix M_ij = ∫ φ_i φ_j dx. Interior rows (h/6, 2h/3, h/6),
/// boundary rows (h/3, h/6).
TridiagonalMatrix assemble_mass(const SpaceGrid& grid);

/// Weighted stiffness A_ij = Σ_e coeff_e ∫_e φ_i' φ_j' dx. Each element
/// contributes (coeff_e/h)·[[1,-1],[-1,1]]. Defined for any coefficient
/// sign; callers that invert must ensure positivity.
TridiagonalMatrix assemble_weighted_stiffness(const SpaceGrid& grid,
                                              const ElementField& coeff);

/// Per-element gradient (field[e+1] - field[e]) / h.
ElementField element_gradient(const SpaceGrid& grid, const NodalField& field);

/// Boundary functional: value at node 0 and last node, zero elsewhere.
/// The 1D boundary integral is the sum of the two endpoint evaluations.
NodalField boundary_load(const SpaceGrid& grid, double left_value,
                         double right_value);

}  // namespace hamrec
