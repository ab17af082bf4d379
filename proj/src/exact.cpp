#include "efit/exact.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace efit {

double advection_profile(AdvectionProfile profile, double s) {
  switch (profile) {
    case AdvectionProfile::sine:
      return std::sin(s);
    case AdvectionProfile::log_sine:
      // Real part of the principal complex logarithm for s < 0.
      return s == 0.0 ? 0.0 : std::log(std::abs(s)) * std::sin(s);
  }
  return 0.0;
}

MkdvBreather::MkdvBreather(double xi) : xi_(xi) {
  if (!(48.0 * xi * xi - 9.0 > 0.0))
    throw std::domain_error("MkdvBreather: need 48 xi^2 - 9 > 0");
  eta_ = xi * std::numbers::sqrt3;
  if (!(eta_ > 0.0)) throw std::domain_error("MkdvBreather: need eta > 0");
  a_ = 3.0;
  b_ = std::sqrt(48.0 * xi * xi - 9.0);
  rho1_ = std::atan((b_ * xi_ - a_ * eta_) / (a_ * xi_ + b_ * eta_));
  // exp(-rho2) = |xi/(2 eta)| sqrt((A^2+B^2)/(xi^2+eta^2)) = 1 exactly here.
  rho2_ = 0.0;
}

double MkdvBreather::carrier_phase(double x, double t) const {
  return 2.0 * xi_ * (x + 4.0 * (xi_ * xi_ - 3.0 * eta_ * eta_) * t);
}

double MkdvBreather::envelope_phase(double x, double t) const {
  // The drift term 4(eta^2 - 3 xi^2) t vanishes identically for eta = sqrt(3) xi.
  (void)t;
  return 2.0 * eta_ * x;
}

double MkdvBreather::operator()(double x, double t) const {
  const double p = carrier_phase(x, t) + rho1_;
  const double q = envelope_phase(x, t) + rho2_;
  // Divided through by cosh^2 q so large |q| decays instead of overflowing.
  const double sech = 1.0 / std::cosh(q);
  const double ratio = eta_ / xi_;
  const double num = xi_ * std::sin(p) * sech + eta_ * std::tanh(q) * std::cos(p) * sech;
  const double den = 1.0 + ratio * ratio * std::cos(p) * std::cos(p) * sech * sech;
  return -4.0 * ratio * num / den;
}

NlsBreather::NlsBreather(double beta, double omega) : beta_(beta), omega_(omega) {
  if (!(beta > 0.0 && beta < std::numbers::sqrt2))
    throw std::domain_error("NlsBreather: need 0 < beta < sqrt(2)");
  if (!(omega > 0.0)) throw std::domain_error("NlsBreather: need omega > 0");
}

double NlsBreather::theta(double t) const {
  return omega_ * beta_ * std::sqrt(2.0 - beta_ * beta_) * t;
}

double NlsBreather::period() const {
  return 2.0 * std::numbers::pi / (std::sqrt(omega_) * beta_);
}

std::array<double, 2> NlsBreather::operator()(double x, double t) const {
  using cd = std::complex<double>;
  const double th = theta(t);
  const double root = std::sqrt(2.0 - beta_ * beta_);
  const cd num(2.0 * beta_ * beta_ * std::cosh(th), 2.0 * beta_ * root * std::sinh(th));
  const double den = 2.0 * std::cosh(th) -
                     std::sqrt(4.0 - 2.0 * beta_ * beta_) * std::cos(std::sqrt(omega_) * beta_ * x);
  const cd psi = (num / den - 1.0) * std::sqrt(omega_) * std::polar(1.0, omega_ * t);
  return {psi.real(), psi.imag()};
}

std::vector<double> ExactSolution::sample(const Grid& grid, double t) const {
  std::vector<double> out(grid.size() * components);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto value = evaluate(grid.node(i), t);
    for (std::size_t c = 0; c < components; ++c) out[i * components + c] = value[c];
  }
  return out;
}

ExactSolution advection_exact(AdvectionProfile profile, double omega) {
  return {1, [profile, omega](double x, double t) -> std::array<double, 2> {
            return {advection_profile(profile, x + omega * t), 0.0};
          }};
}

ExactSolution mkdv_exact(const MkdvBreather& breather) {
  return {1, [breather](double x, double t) -> std::array<double, 2> {
            return {breather(x, t), 0.0};
          }};
}

ExactSolution nls_exact(const NlsBreather& breather) {
  return {2, [breather](double x, double t) { return breather(x, t); }};
}

}  // namespace efit
