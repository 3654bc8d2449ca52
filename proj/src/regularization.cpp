#include "hamrec/regularization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hamrec {

ControlBounds::ControlBounds(double sigma_minus_, double sigma_plus_)
    : sigma_minus(sigma_minus_), sigma_plus(sigma_plus_) {
  if (!(sigma_minus > 0.0) || !(sigma_minus < sigma_plus)) {
    throw std::invalid_argument("ControlBounds: need 0 < sigma_minus < sigma_plus");
  }
  sigma_bar = 0.5 * (sigma_plus + sigma_minus);
  sigma_hat = 0.5 * (sigma_plus - sigma_minus);
}

RegularizedHamiltonian::RegularizedHamiltonian(ControlBounds bounds,
                                               double delta)
    : bounds_(bounds), delta_(delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("RegularizedHamiltonian: need delta > 0");
  }
}

double RegularizedHamiltonian::h_exact(double s) const {
  return (s >= 0.0 ? bounds_.sigma_plus : bounds_.sigma_minus) * s;
}

double RegularizedHamiltonian::h_prime(double s) const {
  return bounds_.sigma_bar + bounds_.sigma_hat * std::tanh(s / delta_);
}

double RegularizedHamiltonian::h_second(double s) const {
  // sech^2(x) = 4 e^{-2|x|} / (1 + e^{-2|x|})^2, safe for any |x|
  const double u = std::exp(-2.0 * std::abs(s) / delta_);
  const double sech2 = 4.0 * u / ((1.0 + u) * (1.0 + u));
  return bounds_.sigma_hat / delta_ * sech2;
}

double RegularizedHamiltonian::h_delta(double s) const {
  if (s == 0.0) return 0.0;  // primitive anchored at 0
  // Evaluated as h_exact(s) plus the deviation of delta*lncosh(s/delta)
  // from |s|, which lies in [-gap_bound(), 0]; this form keeps the
  // cancellation against h_exact down to one rounding.
  const double x = std::abs(s) / delta_;
  const double t = std::log1p(std::exp(-2.0 * x));  // in [0, ln 2]
  const double corr = bounds_.sigma_hat * delta_ * (t - std::numbers::ln2);
  const double lead = h_exact(s);
  double r = lead + corr;
  // that rounding may overshoot the envelope [lead - gap_bound(), lead]
  // by an ulp when the true value sits on its edge; walk back inside
  const double bound = gap_bound();
  while (r - lead < -bound || r - lead > 0.0) {
    r = std::nextafter(r, lead);
  }
  return r;
}

double RegularizedHamiltonian::gap_bound() const {
  return bounds_.sigma_hat * delta_ * std::numbers::ln2;
}

double h_tikhonov(double s, const ControlBounds& bounds, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("h_tikhonov: need delta > 0");
  }
  // concave parabola sigma*(s - delta*sigma): interior vertex or endpoints
  const double lo = bounds.sigma_minus * (s - delta * bounds.sigma_minus);
  const double hi = bounds.sigma_plus * (s - delta * bounds.sigma_plus);
  double best = lo > hi ? lo : hi;
  const double vertex = s / (2.0 * delta);
  if (vertex > bounds.sigma_minus && vertex < bounds.sigma_plus) {
    const double interior = s * s / (4.0 * delta);
    if (interior > best) best = interior;
  }
  return best;
}

double penalty_primitive(double sigma, const ControlBounds& bounds,
                         double delta) {
  if (!(sigma >= bounds.sigma_minus && sigma <= bounds.sigma_plus)) {
    throw std::domain_error("penalty_primitive: sigma outside [sigma_minus, sigma_plus]");
  }
  const double t1 = sigma - bounds.sigma_minus;
  const double t2 = bounds.sigma_plus - sigma;
  // x ln x -> 0 at the endpoints
  const double term1 = t1 > 0.0 ? t1 * std::log(t1 / bounds.sigma_hat) : 0.0;
  const double term2 = t2 > 0.0 ? t2 * std::log(t2 / bounds.sigma_hat) : 0.0;
  return delta / (2.0 * bounds.sigma_hat) * (term1 + term2);
}

}  // namespace hamrec
