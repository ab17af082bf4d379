#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "efit/banded.hpp"
#include "efit/newton.hpp"
#include "efit/problems.hpp"

namespace efit {

class SingularParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Coefficients of an s-stage exponentially fitted Runge-Kutta method
///
///   u1  = u0 + dt sum_i b_i f(t0 + c_i dt, Y_i)
///   Y_i = gamma_i u0 + dt sum_j a_ij f(t0 + c_j dt, Y_j)
///
/// `nu` = omega*dt is the fitted parameter the coefficients were built for
/// (0 for classic tableaus). `a` is row-major s x s.
struct Tableau {
  std::size_t stages = 0;
  std::vector<double> gamma;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  double nu = 0.0;
  std::string label;

  double a_at(std::size_t i, std::size_t j) const { return a[i * stages + j]; }
  /// Throws std::invalid_argument on inconsistent sizes or gamma_i <= 0.
  void validate() const;
  /// One stage with c = 1/2 and a = gamma*b/2: the stage is gamma*(u0+u1)/2.
  bool is_midpoint_form() const;
};

/// One-stage method exact on span{cos(omega t), sin(omega t)}:
/// gamma = 1/cos(c1 nu), a = tan(c1 nu)/nu, b = sin(nu)/(nu cos(c1 nu)).
/// Small |nu| uses the Taylor expansion; throws SingularParameterError near
/// |c1 nu| = pi/2 or |nu| = pi.
Tableau one_stage_ef_coeffs(double nu, double c1);
Tableau ef_midpoint(double nu);
Tableau classic_midpoint();
/// Two-stage Gauss-Legendre (classic, order 4).
Tableau gauss_legendre_2();

struct SymplecticityReport {
  bool symplectic = false;
  double max_defect = 0.0;
};

/// max_ij |b_i a_ij/gamma_i + b_j a_ji/gamma_j - b_i b_j| against tol.
SymplecticityReport is_symplectic(const Tableau& tableau, double tol);

struct StageSolution {
  std::vector<std::vector<double>> Y;
  std::vector<std::vector<double>> f_at_stages;
};

struct StepResult {
  std::vector<double> u_next;
  StageSolution stages;
  int newton_iterations = 0;
  double residual_norm = 0.0;
};

/// Reusable Jacobian factorization for problems with a constant Jacobian.
class StepCache {
 public:
  const BandedLU* find(double key_dt, const Tableau& tableau) const;
  void store(double key_dt, const Tableau& tableau, BandedLU lu);

 private:
  double dt_ = 0.0;
  std::vector<double> signature_;
  std::optional<BandedLU> lu_;
};

/// Advances one step. Midpoint-form tableaus solve the compact equation
/// u1 = u0 + dt b f((gamma/2)(u1 + u0)) for u1; any other tableau solves
/// the stacked stage system. Dirichlet nodes of u1 take the closure value at
/// t_n + dt; boundary stage values follow from the closure.
StepResult step(const Tableau& tableau, const SemidiscreteProblem& problem,
                std::span<const double> u_n, double t_n, double dt,
                const SolverOptions& opts = {}, StepCache* cache = nullptr);

/// Family of tableaus parameterised by nu = omega*dt.
class Scheme {
 public:
  enum class Kind { classic, ef, ef_c1, fixed };

  static Scheme classic();
  static Scheme ef();
  static Scheme ef_c1(double c1);
  static Scheme fixed(Tableau tableau);
  /// Accepts "classic", "ef" and "ef_c1:<value>".
  static Scheme parse(std::string_view text);

  Kind kind() const { return kind_; }
  double c1() const { return c1_; }
  bool fitted() const { return kind_ == Kind::ef || kind_ == Kind::ef_c1; }
  std::string label() const;
  Tableau at(double nu) const;

 private:
  Kind kind_ = Kind::classic;
  double c1_ = 0.5;
  std::optional<Tableau> fixed_;
};

/// States u_0..u_N of one run plus the retained stage of one-stage runs.
struct Trajectory {
  std::shared_ptr<const SemidiscreteProblem> problem;
  Tableau tableau;
  std::string scheme;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::vector<double>> states;
  /// Y_1 of every step for one-stage tableaus; empty otherwise.
  std::vector<std::vector<double>> stages;
  std::vector<int> newton_iterations;

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
  double time(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }
};

/// Number of steps of size dt covering [t0, T]; throws if dt does not
/// divide the interval (relative tolerance 1e-9).
std::size_t step_count(double t0, double T, double dt);

/// Integrates from t0 to T. Fitted schemes build their tableau once with
/// nu = omega*dt.
Trajectory integrate(const Scheme& scheme, std::shared_ptr<const SemidiscreteProblem> problem,
                     std::vector<double> u0, double t0, double T, double dt, double omega,
                     const SolverOptions& opts = {});

}  // namespace efit
