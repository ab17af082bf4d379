#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "efit/grid.hpp"

namespace efit {

/// Initial profile f of the advection traveling wave f(x + omega*t).
enum class AdvectionProfile {
  sine,      // sin(s)
  log_sine,  // log|s| sin(s), continuous extension 0 at s = 0
};

double advection_profile(AdvectionProfile profile, double s);

/// Stationary mKdV breather. The envelope parameters are tied to xi:
/// eta = sqrt(3) xi, A = 3, B = sqrt(48 xi^2 - 9), which makes the
/// envelope phase time-independent and its shift rho2 vanish.
class MkdvBreather {
 public:
  explicit MkdvBreather(double xi);

  double xi() const { return xi_; }
  double eta() const { return eta_; }
  double a_coeff() const { return a_; }
  double b_coeff() const { return b_; }
  double rho1() const { return rho1_; }
  double rho2() const { return rho2_; }
  /// Temporal frequency 64 xi^3.
  double omega() const { return 64.0 * xi_ * xi_ * xi_; }

  double carrier_phase(double x, double t) const;   // nu1
  double envelope_phase(double x, double t) const;  // nu2
  double operator()(double x, double t) const;

 private:
  double xi_;
  double eta_;
  double a_;
  double b_;
  double rho1_;
  double rho2_;
};

/// Spatially periodic NLS breather psi = u + i v with a temporally localized
/// envelope; requires 0 < beta < sqrt(2) and omega > 0.
class NlsBreather {
 public:
  NlsBreather(double beta, double omega);

  double beta() const { return beta_; }
  double omega() const { return omega_; }
  double theta(double t) const;
  /// Spatial period 2 pi / (sqrt(omega) beta).
  double period() const;
  std::array<double, 2> operator()(double x, double t) const;

 private:
  double beta_;
  double omega_;
};

/// Pointwise exact solution with one or two components (u, or u and v).
struct ExactSolution {
  std::size_t components = 1;
  std::function<std::array<double, 2>(double x, double t)> evaluate;

  /// Samples on every grid node, interleaved by component like State.
  std::vector<double> sample(const Grid& grid, double t) const;
};

ExactSolution advection_exact(AdvectionProfile profile, double omega);
ExactSolution mkdv_exact(const MkdvBreather& breather);
ExactSolution nls_exact(const NlsBreather& breather);

}  // namespace efit
