#pragma once

// Shared test-side oracles. Everything here re-derives values through an
// independent path (dense Eigen matrices, direct quadrature loops, its own
// tanh formulas) so the library cannot be its own referee.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "hamrec/heat_adjoint.hpp"
#include "hamrec/wave_adjoint.hpp"

namespace testsupport {

inline Eigen::MatrixXd to_dense(const hamrec::TridiagonalMatrix& t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t.n, t.n);
  for (int i = 0; i < t.n; ++i) {
    m(i, i) = t.main[i];
    if (i + 1 < t.n) {
      m(i + 1, i) = t.lower[i];
      m(i, i + 1) = t.upper[i];
    }
  }
  return m;
}

// direct-quadrature dense assembly, independent of the library path
inline Eigen::MatrixXd dense_mass(int n_elements, double h) {
  const int nn = n_elements + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nn, nn);
  for (int e = 0; e < n_elements; ++e) {
    m(e, e) += h / 3.0;
    m(e + 1, e + 1) += h / 3.0;
    m(e, e + 1) += h / 6.0;
    m(e + 1, e) += h / 6.0;
  }
  return m;
}

inline Eigen::MatrixXd dense_stiffness(const std::vector<double>& coeff,
                                       double h) {
  const int ne = static_cast<int>(coeff.size());
  const int nn = ne + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nn, nn);
  for (int e = 0; e < ne; ++e) {
    const double c = coeff[e] / h;
    a(e, e) += c;
    a(e + 1, e + 1) += c;
    a(e, e + 1) -= c;
    a(e + 1, e) -= c;
  }
  return a;
}

// the regularized control map, written out independently
inline double oracle_h_prime(double s, double sminus, double splus,
                             double delta) {
  return 0.5 * (splus + sminus) +
         0.5 * (splus - sminus) * std::tanh(s / delta);
}

// dense matrix of any stacked linear map, column by column
template <class ApplyFn>
Eigen::MatrixXd dense_from_apply(int dim, ApplyFn&& apply) {
  Eigen::MatrixXd m(dim, dim);
  std::vector<double> e(dim, 0.0), col(dim);
  for (int j = 0; j < dim; ++j) {
    e[j] = 1.0;
    apply(e, col);
    for (int i = 0; i < dim; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

inline Eigen::MatrixXd dense_heat_jacobian(
    const hamrec::HeatJacobianBlocks& blocks, bool zero_K12) {
  const int nn = blocks.n_nodes;
  const int N = blocks.n_steps;
  const int dim = blocks.dimension();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::MatrixXd M = to_dense(blocks.mass);
  for (int n = 0; n < N; ++n) {
    const Eigen::MatrixXd K11 = to_dense(blocks.K11_diag[n]);
    J.block(n * nn, n * nn, nn, nn) = K11;
    if (n > 0) J.block(n * nn, (n - 1) * nn, nn, nn) = -M;
    if (!zero_K12) {
      J.block(n * nn, (N + n) * nn, nn, nn) = to_dense(blocks.K12_diag[n]);
    }
    J.block((N + n) * nn, n * nn, nn, nn) = to_dense(blocks.K21_diag[n]);
    J.block((N + n) * nn, (N + n) * nn, nn, nn) = K11.transpose();
    if (n < N - 1) J.block((N + n) * nn, (N + n + 1) * nn, nn, nn) = -M;
  }
  return J;
}

inline Eigen::MatrixXd dense_wave_jacobian(
    const hamrec::WaveJacobianBlocks& blocks, bool zero_K14) {
  const int nn = blocks.n_nodes;
  const int N = blocks.n_steps;
  const int dim = blocks.dimension();
  const double k = blocks.k;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::MatrixXd M = to_dense(blocks.mass);
  const int ou = 0, ov = N * nn, op = 2 * N * nn, oq = 3 * N * nn;
  for (int n = 0; n < N; ++n) {
    const Eigen::MatrixXd A = to_dense(blocks.A[n]);
    const Eigen::MatrixXd B = to_dense(blocks.B[n]);
    const Eigen::MatrixXd C = to_dense(blocks.C[n]);
    // F1 rows
    J.block(ou + n * nn, ou + n * nn, nn, nn) = A;
    J.block(ou + n * nn, ov + n * nn, nn, nn) = M;
    if (!zero_K14) J.block(ou + n * nn, oq + n * nn, nn, nn) = B;
    if (n > 0) {
      J.block(ou + n * nn, ou + (n - 1) * nn, nn, nn) = A;
      J.block(ou + n * nn, ov + (n - 1) * nn, nn, nn) = -M;
    }
    if (n < N - 1 && !zero_K14) {
      J.block(ou + n * nn, oq + (n + 1) * nn, nn, nn) = B;
    }
    // F2 rows
    J.block(ov + n * nn, ou + n * nn, nn, nn) = M;
    J.block(ov + n * nn, ov + n * nn, nn, nn) = -0.5 * k * M;
    if (n > 0) {
      J.block(ov + n * nn, ou + (n - 1) * nn, nn, nn) = -M;
      J.block(ov + n * nn, ov + (n - 1) * nn, nn, nn) = -0.5 * k * M;
    }
    // G1 rows
    J.block(op + n * nn, op + n * nn, nn, nn) = -0.5 * k * M;
    J.block(op + n * nn, oq + n * nn, nn, nn) = M;
    if (n < N - 1) {
      J.block(op + n * nn, op + (n + 1) * nn, nn, nn) = -0.5 * k * M;
      J.block(op + n * nn, oq + (n + 1) * nn, nn, nn) = -M;
    }
    // G2 rows
    J.block(oq + n * nn, ou + n * nn, nn, nn) = C;
    J.block(oq + n * nn, op + n * nn, nn, nn) = M;
    J.block(oq + n * nn, oq + n * nn, nn, nn) = A;
    if (n > 0) J.block(oq + n * nn, ou + (n - 1) * nn, nn, nn) = C;
    if (n < N - 1) {
      J.block(oq + n * nn, op + (n + 1) * nn, nn, nn) = -M;
      J.block(oq + n * nn, oq + (n + 1) * nn, nn, nn) = A;
    }
  }
  return J;
}

inline std::vector<double> random_vector(int n, std::mt19937& rng,
                                         double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline double rel_err(const std::vector<double>& a,
                      const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace testsupport
