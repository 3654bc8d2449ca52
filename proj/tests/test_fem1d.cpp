#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <random>

#include "hamrec/fem1d.hpp"
#include "test_support.hpp"

using namespace hamrec;
using namespace testsupport;

TEST_CASE("grids are uniform with exact endpoints") {
  const SpaceGrid g = SpaceGrid::uniform(0.0, 1.0, 50);
  CHECK(g.n_nodes() == 51);
  CHECK(g.node_coords.front() == 0.0);
  CHECK(g.node_coords.back() == 1.0);
  for (int i = 0; i < g.n_elements; ++i) {
    CHECK(g.node_coords[i] < g.node_coords[i + 1]);
    CHECK(g.node_coords[i + 1] - g.node_coords[i] ==
          doctest::Approx(g.h).epsilon(1e-14));
  }
  const TimeGrid t = TimeGrid::uniform(1.0, 50);
  CHECK(t.k * t.n_steps == doctest::Approx(t.T).epsilon(1e-15));
  CHECK(t.times.size() == 51);
  CHECK_THROWS_AS(SpaceGrid::uniform(1.0, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::uniform(-1.0, 4), std::invalid_argument);
}

TEST_CASE("mass matrix entries, row sums and definiteness") {
  const SpaceGrid g = SpaceGrid::uniform(0.0, 1.0, 2);  // h = 0.5
  const TridiagonalMatrix m = assemble_mass(g);
  CHECK(m.main[0] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(m.main[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(m.main[2] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(m.lower[0] == doctest::Approx(1.0 / 12).epsilon(1e-15));
  CHECK(m.upper[1] == doctest::Approx(1.0 / 12).epsilon(1e-15));
  CHECK(m.symmetric());

  // row sums are the integrals of the hat functions
  const SpaceGrid g2 = SpaceGrid::uniform(0.0, 2.0, 8);
  const TridiagonalMatrix m2 = assemble_mass(g2);
  const NodalField ones(g2.n_nodes(), 1.0);
  const NodalField sums = m2.apply(ones);
  CHECK(sums.front() == doctest::Approx(g2.h / 2).epsilon(1e-14));
  CHECK(sums.back() == doctest::Approx(g2.h / 2).epsilon(1e-14));
  for (int i = 1; i < g2.n_nodes() - 1; ++i) {
    CHECK(sums[i] == doctest::Approx(g2.h).epsilon(1e-14));
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(to_dense(m2));
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("weighted stiffness stencil, null space and scaling") {
  const SpaceGrid g = SpaceGrid::uniform(0.0, 1.0, 2);  // h = 0.5
  const TridiagonalMatrix a =
      assemble_weighted_stiffness(g, ElementField{1.0, 1.0});
  CHECK(a.main[0] == 2.0);
  CHECK(a.main[1] == 4.0);
  CHECK(a.main[2] == 2.0);
  CHECK(a.lower[0] == -2.0);
  CHECK(a.upper[0] == -2.0);
  CHECK(a.symmetric());

  const SpaceGrid g2 = SpaceGrid::uniform(0.0, 1.0, 4);  // dyadic h
  std::mt19937 rng(3);
  ElementField coeff = random_vector(4, rng);
  for (double& c : coeff) c = 1.0 + std::abs(c);
  const TridiagonalMatrix ar = assemble_weighted_stiffness(g2, coeff);
  const NodalField constant(g2.n_nodes(), 3.25);
  for (double v : ar.apply(constant)) CHECK(v == 0.0);

  const TridiagonalMatrix a1 =
      assemble_weighted_stiffness(g2, ElementField(4, 1.0));
  const TridiagonalMatrix a3 =
      assemble_weighted_stiffness(g2, ElementField(4, 3.0));
  for (int i = 0; i < a1.n; ++i) CHECK(a3.main[i] == 3.0 * a1.main[i]);
  for (int i = 0; i + 1 < a1.n; ++i) CHECK(a3.lower[i] == 3.0 * a1.lower[i]);
}

TEST_CASE("stiffness is positive semidefinite with constants as null space") {
  const SpaceGrid g = SpaceGrid::uniform(0.0, 1.0, 12);
  std::mt19937 rng(5);
  ElementField coeff = random_vector(12, rng);
  for (double& c : coeff) c = 0.5 + std::abs(c);
  const Eigen::MatrixXd a = to_dense(assemble_weighted_stiffness(g, coeff));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  REQUIRE(es.info() == Eigen::Success);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
  CHECK(es.eigenvalues()(1) > 1e-3);  // one-dimensional null space only
}

TEST_CASE("quadrature identity for random fields") {
  const SpaceGrid g = SpaceGrid::uniform(-1.0, 2.0, 9);
  std::mt19937 rng(17);
  ElementField coeff = random_vector(9, rng);
  for (double& c : coeff) c = 0.1 + std::abs(c);
  const TridiagonalMatrix a = assemble_weighted_stiffness(g, coeff);
  for (int trial = 0; trial < 20; ++trial) {
    const NodalField w = random_vector(g.n_nodes(), rng);
    const NodalField v = random_vector(g.n_nodes(), rng);
    const NodalField av = a.apply(v);
    double lhs = 0.0;
    for (int i = 0; i < g.n_nodes(); ++i) lhs += w[i] * av[i];
    const ElementField gw = element_gradient(g, w);
    const ElementField gv = element_gradient(g, v);
    double rhs = 0.0;
    for (int e = 0; e < g.n_elements; ++e) {
      rhs += coeff[e] * gw[e] * gv[e] * g.h;
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("element gradients") {
  const SpaceGrid g1 = SpaceGrid::uniform(0.0, 0.5, 1);
  CHECK(element_gradient(g1, NodalField{0.0, 1.0})[0] ==
        doctest::Approx(2.0).epsilon(1e-15));

  const SpaceGrid g = SpaceGrid::uniform(0.0, 1.0, 7);
  const ElementField gid = element_gradient(g, g.node_coords);
  for (double v : gid) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
  for (double v : element_gradient(g, NodalField(8, 4.2))) CHECK(v == 0.0);

  // linearity
  std::mt19937 rng(23);
  const NodalField u = random_vector(8, rng);
  const NodalField w = random_vector(8, rng);
  const double alpha = 1.7, beta = -0.3;
  NodalField combo(8);
  for (int i = 0; i < 8; ++i) combo[i] = alpha * u[i] + beta * w[i];
  const ElementField gu = element_gradient(g, u);
  const ElementField gw = element_gradient(g, w);
  const ElementField gc = element_gradient(g, combo);
  for (int e = 0; e < 7; ++e) {
    CHECK(gc[e] == doctest::Approx(alpha * gu[e] + beta * gw[e]).epsilon(1e-12));
  }
}

TEST_CASE("boundary load places endpoint values") {
  const SpaceGrid g = SpaceGrid::uniform(0.0, 1.0, 2);
  for (double v : boundary_load(g, 0.0, 0.0)) CHECK(v == 0.0);
  const NodalField f = boundary_load(g, 1.0, 1.0);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 1.0);
  double pairing = 0.0;
  const NodalField j = boundary_load(g, 0.7, -0.2);
  for (double v : j) pairing += v;
  CHECK(pairing == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("tridiagonal solve matches a dense oracle") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 12;
    TridiagonalMatrix t = TridiagonalMatrix::zero(n);
    t.main = random_vector(n, rng);
    for (double& v : t.main) v = 3.0 + std::abs(v);
    t.lower = random_vector(n - 1, rng);
    t.upper = random_vector(n - 1, rng);
    const NodalField rhs = random_vector(n, rng);
    const NodalField x = t.solve(rhs);
    const Eigen::VectorXd xe =
        to_dense(t).fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), n));
    for (int i = 0; i < n; ++i) {
      CHECK(x[i] == doctest::Approx(xe(i)).epsilon(1e-11));
    }
  }
  TridiagonalMatrix sing = TridiagonalMatrix::zero(3);
  CHECK_THROWS_AS(sing.solve(NodalField{1.0, 0.0, 0.0}), std::runtime_error);
}
