#pragma once

namespace hamrec {

/// Admissible coefficient band [sigma_minus, sigma_plus] together with its
/// midpoint and half-width.
struct ControlBounds {
  double sigma_minus = 0.0;
  double sigma_plus = 0.0;
  double sigma_bar = 0.0;  // (sigma_plus + sigma_minus)/2
  double sigma_hat = 0.0;  // (sigma_plus - sigma_minus)/2

  ControlBounds() = default;
  /// Requires 0 < sigma_minus < sigma_plus.
  ControlBounds(double sigma_minus, double sigma_plus);
};

/// Pointwise Hamiltonian density for the coefficient band and its smooth
/// tanh regularization with parameter delta > 0:
///
///   h(s)        = max(sigma_minus*s, sigma_plus*s)
///   h'_delta(s) = sigma_bar + sigma_hat * tanh(s/delta)
///   h''_delta(s)= (sigma_hat/delta) * sech^2(s/delta)
///   h_delta(s)  = sigma_bar*s + sigma_hat*delta*lncosh(s/delta)
///
/// h_delta is the primitive of h'_delta anchored at h_delta(0) = 0, so
/// |h_delta(s) - h(s)| <= sigma_hat*delta*ln 2 uniformly in s. All
/// evaluations are overflow-safe for |s|/delta up to ~1e300.
class RegularizedHamiltonian {
 public:
  RegularizedHamiltonian(ControlBounds bounds, double delta);

  double h_exact(double s) const;
  double h_prime(double s) const;
  double h_second(double s) const;
  double h_delta(double s) const;

  /// sigma_hat * delta * ln 2, the uniform bound on |h_delta - h_exact|.
  double gap_bound() const;

  const ControlBounds& bounds() const { return bounds_; }
  double delta() const { return delta_; }
  RegularizedHamiltonian with_delta(double delta) const {
    return RegularizedHamiltonian(bounds_, delta);
  }

 private:
  ControlBounds bounds_;
  double delta_ = 0.0;
};

/// Hamiltonian density of the Tikhonov-penalized problem:
/// max over sigma in [sigma_minus, sigma_plus] of sigma*(s - delta*sigma).
double h_tikhonov(double s, const ControlBounds& bounds, double delta);

/// Penalty function equivalent to the tanh regularization:
///   S(sigma) = delta/(2 sigma_hat) * [ (sigma-sigma_minus)*ln((sigma-sigma_minus)/sigma_hat)
///                                    + (sigma_plus-sigma)*ln((sigma_plus-sigma)/sigma_hat) ]
/// with the endpoint values taken as limits. Throws std::domain_error for
/// sigma outside [sigma_minus, sigma_plus].
double penalty_primitive(double sigma, const ControlBounds& bounds,
                         double delta);

}  // namespace hamrec
