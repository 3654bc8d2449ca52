#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hamrec/regularization.hpp"

using namespace hamrec;

TEST_CASE("control bounds hold midpoint and half-width exactly") {
  const ControlBounds b(0.5, 1.0);
  CHECK(b.sigma_bar == 0.75);
  CHECK(b.sigma_hat == 0.25);
  CHECK(b.sigma_bar - b.sigma_hat == b.sigma_minus);
  CHECK(b.sigma_bar + b.sigma_hat == b.sigma_plus);

  const ControlBounds c(1.0, 2.0);
  CHECK(c.sigma_bar - c.sigma_hat == c.sigma_minus);
  CHECK(c.sigma_bar + c.sigma_hat == c.sigma_plus);

  CHECK_THROWS_AS(ControlBounds(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ControlBounds(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RegularizedHamiltonian(b, 0.0), std::invalid_argument);
}

TEST_CASE("exact density picks the better bound") {
  const RegularizedHamiltonian reg(ControlBounds(0.5, 1.0), 1e-3);
  CHECK(reg.h_exact(0.0) == 0.0);
  CHECK(reg.h_exact(2.0) == 2.0);
  CHECK(reg.h_exact(-2.0) == -1.0);
}

TEST_CASE("regularized slope values") {
  const RegularizedHamiltonian reg(ControlBounds(0.5, 1.0), 1e-6);
  CHECK(reg.h_prime(0.0) == 0.75);
  CHECK(reg.h_prime(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reg.h_prime(-1.0) == doctest::Approx(0.5).epsilon(1e-12));

  const RegularizedHamiltonian wide(ControlBounds(1.0, 2.0), 0.3);
  CHECK(wide.h_prime(0.3) ==
        doctest::Approx(1.5 + 0.5 * std::tanh(1.0)).epsilon(1e-15));
}

TEST_CASE("slope is monotone and stays inside the band") {
  const ControlBounds b(0.5, 1.0);
  const RegularizedHamiltonian reg(b, 0.7);
  double prev = -1e300;
  for (int i = 0; i <= 400; ++i) {
    const double s = -7.0 + 14.0 * i / 400.0;  // |s|/delta <= 10, no FP saturation
    const double v = reg.h_prime(s);
    CHECK(v > prev);
    CHECK(v > b.sigma_minus);
    CHECK(v < b.sigma_plus);
    prev = v;
  }
  // saturated tail stays within the closed band
  for (double s : {-1e9, -1e3, 1e3, 1e9}) {
    const double v = reg.h_prime(s);
    CHECK(v >= b.sigma_minus);
    CHECK(v <= b.sigma_plus);
  }
}

TEST_CASE("bang-bang limit as delta -> 0") {
  const ControlBounds b(0.5, 1.0);
  for (double s : {0.4, 2.0}) {
    double prev_gap = 1e300;
    for (double delta : {1e-1, 1e-3, 1e-6}) {
      const double gap =
          b.sigma_plus - RegularizedHamiltonian(b, delta).h_prime(s);
      CHECK(gap >= 0.0);
      CHECK(gap <= prev_gap);
      prev_gap = gap;
    }
    CHECK(RegularizedHamiltonian(b, 1e-6).h_prime(s) ==
          doctest::Approx(b.sigma_plus).epsilon(1e-12));
    CHECK(RegularizedHamiltonian(b, 1e-6).h_prime(-s) ==
          doctest::Approx(b.sigma_minus).epsilon(1e-12));
  }
}

TEST_CASE("curvature value, decay, symmetry and sign") {
  const ControlBounds b(0.5, 1.0);
  const double delta = 1e-2;
  const RegularizedHamiltonian reg(b, delta);
  CHECK(reg.h_second(0.0) == b.sigma_hat / delta);
  CHECK(reg.h_second(1e6) == 0.0);
  CHECK(reg.h_second(-1e6) == 0.0);
  for (double s : {1e-3, 0.05, 0.3, 2.0}) {
    CHECK(reg.h_second(s) >= 0.0);
    CHECK(reg.h_second(s) == reg.h_second(-s));
  }
}

TEST_CASE("curvature matches central differences of the slope") {
  for (double delta : {1.0, 1e-2}) {
    const RegularizedHamiltonian reg(ControlBounds(0.5, 1.0), delta);
    const double s = 0.3 * delta;
    const double eps = 1e-6 * delta;
    const double fd =
        (reg.h_prime(s + eps) - reg.h_prime(s - eps)) / (2.0 * eps);
    CHECK(fd == doctest::Approx(reg.h_second(s)).epsilon(1e-7));
  }
}

TEST_CASE("primitive anchored at zero with the uniform gap bound") {
  const ControlBounds b(0.5, 1.0);
  const RegularizedHamiltonian reg(b, 0.1);
  CHECK(reg.h_delta(0.0) == 0.0);

  const double bound = b.sigma_hat * 0.1 * std::numbers::ln2;
  CHECK(reg.gap_bound() == bound);
  for (int i = 0; i <= 2000; ++i) {
    const double s = -10.0 + 20.0 * i / 2000.0;
    CHECK(std::abs(reg.h_delta(s) - reg.h_exact(s)) <= bound);
  }
  // far out the asymptote is h_exact shifted down by the full gap
  CHECK(reg.h_delta(5.0) ==
        doctest::Approx(reg.h_exact(5.0) - bound).epsilon(1e-14));
  CHECK(reg.h_delta(-5.0) ==
        doctest::Approx(reg.h_exact(-5.0) - bound).epsilon(1e-14));
}

TEST_CASE("primitive derivative is the regularized slope") {
  const RegularizedHamiltonian reg(ControlBounds(1.0, 2.0), 0.25);
  for (double s : {-0.8, -0.1, 0.0, 0.05, 0.4, 3.0}) {
    const double eps = 1e-6;
    const double fd =
        (reg.h_delta(s + eps) - reg.h_delta(s - eps)) / (2.0 * eps);
    CHECK(fd == doctest::Approx(reg.h_prime(s)).epsilon(1e-8));
  }
}

TEST_CASE("tikhonov-comparison density against a grid-search oracle") {
  const ControlBounds b(1.0, 2.0);
  CHECK(h_tikhonov(3.0, b, 1.0) == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(h_tikhonov(0.0, b, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(h_tikhonov(10.0, b, 1.0) == doctest::Approx(16.0).epsilon(1e-12));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> sdist(-6.0, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double s = sdist(rng);
    const double delta = 0.5;
    double best = -1e300;
    for (int i = 0; i <= 10000; ++i) {
      const double sigma = 1.0 + i * 1e-4;
      best = std::max(best, sigma * (s - delta * sigma));
    }
    const double val = h_tikhonov(s, b, delta);
    CHECK(val >= best - 1e-12);
    CHECK(val <= best + 1e-7);  // grid resolution
  }
}

TEST_CASE("tikhonov value dominates every sampled control") {
  const ControlBounds b(0.5, 1.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> sdist(-5.0, 5.0);
  std::uniform_real_distribution<double> cdist(0.5, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = sdist(rng);
    const double sigma = cdist(rng);
    CHECK(h_tikhonov(s, b, 0.3) >= sigma * (s - 0.3 * sigma) - 1e-14);
  }
}

TEST_CASE("penalty primitive values and domain") {
  const ControlBounds b(1.0, 2.0);
  const double delta = 1.0;
  CHECK(penalty_primitive(b.sigma_bar, b, delta) == 0.0);
  CHECK(penalty_primitive(1.25, b, delta) ==
        doctest::Approx(0.25 * std::log(0.5) + 0.75 * std::log(1.5))
            .epsilon(1e-15));
  // endpoint limits of the printed formula: x ln x -> 0 leaves the
  // (2 sigma_hat) ln 2 term, so S at either bound is delta ln 2
  CHECK(penalty_primitive(b.sigma_plus, b, delta) ==
        doctest::Approx(delta * std::numbers::ln2).epsilon(1e-15));
  CHECK(penalty_primitive(b.sigma_minus, b, delta) ==
        doctest::Approx(delta * std::numbers::ln2).epsilon(1e-15));
  CHECK(penalty_primitive(b.sigma_plus - 1e-9, b, delta) ==
        doctest::Approx(delta * std::numbers::ln2).epsilon(1e-6));
  CHECK_THROWS_AS(penalty_primitive(0.999, b, delta), std::domain_error);
  CHECK_THROWS_AS(penalty_primitive(2.001, b, delta), std::domain_error);

  // well shape: minimum 0 at sigma_bar, symmetric, rising to the endpoints
  double prev = penalty_primitive(b.sigma_bar, b, delta);
  for (int i = 1; i <= 20; ++i) {
    const double sigma = b.sigma_bar + i * (b.sigma_hat / 20.0);
    const double val = penalty_primitive(sigma, b, delta);
    CHECK(val >= prev - 1e-15);
    CHECK(val == doctest::Approx(penalty_primitive(2.0 * b.sigma_bar - sigma,
                                                   b, delta))
                     .epsilon(1e-12));
    prev = val;
  }
}
