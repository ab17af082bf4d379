#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "efit/banded.hpp"
#include "efit/exact.hpp"
#include "efit/grid.hpp"

namespace efit {

enum class ProblemId { advection, mkdv, nls };

std::string_view to_string(ProblemId id);
ProblemId parse_problem_id(std::string_view text);

enum class DensityKind { linear, quadratic_homogeneous };

/// Metadata of one discrete conservation law. The density and flux
/// evaluators live on the owning problem (density(law, ...), flux(law, ...)).
struct ConservationLaw {
  std::string name;
  DensityKind density_kind;
  /// The characteristic the law was derived with; documentation only.
  std::string characteristic_doc;
};

/// Method-of-lines right-hand side f(t, U) together with its two discrete
/// conservation laws D_x F_m + D_t G_m = 0.
///
/// States are flat vectors of components() * M values, interleaved by node:
/// state[m * components() + c]. Law indices are 1 and 2. Fluxes are returned
/// on M + 1 nodes so that the discrete divergence at node m reads
/// (F_{m+1} - F_m)/dx; entries whose stencil leaves a bounded grid are masked.
/// Instances are immutable after construction.
class SemidiscreteProblem {
 public:
  explicit SemidiscreteProblem(Grid grid) : grid_(grid) {}
  virtual ~SemidiscreteProblem() = default;

  virtual ProblemId id() const = 0;
  const Grid& grid() const { return grid_; }
  virtual std::size_t components() const { return 1; }
  std::size_t state_size() const { return components() * grid_.size(); }

  virtual void rhs(double t, std::span<const double> state, std::span<double> out) const = 0;
  std::vector<double> rhs(double t, std::span<const double> state) const;

  /// Analytic Jacobian of rhs with half_bandwidth() bands, periodic iff the
  /// grid is. Rows of Dirichlet boundary nodes are zero.
  virtual BandedMatrix jacobian(double t, std::span<const double> state) const = 0;
  virtual std::size_t half_bandwidth() const = 0;
  /// True when rhs is affine in the state (Jacobian state-independent).
  virtual bool is_linear() const { return false; }

  virtual const std::array<ConservationLaw, 2>& laws() const = 0;
  const ConservationLaw& law(int index) const;

  virtual std::vector<double> density(int law, std::span<const double> state) const = 0;
  /// `state_dot` fills the time-derivative slots of fluxes that have them and
  /// is ignored otherwise.
  virtual MaskedField flux(int law, std::span<const double> state,
                           std::span<const double> state_dot) const = 0;
  virtual bool flux_needs_time_derivative(int /*law*/) const { return false; }

  /// Flat indices prescribed by a Dirichlet closure (empty otherwise).
  virtual std::vector<std::size_t> boundary_indices() const { return {}; }
  /// Closure values at boundary_indices() for time t.
  virtual std::vector<double> boundary_values(double /*t*/) const { return {}; }

 protected:
  void check_state(std::span<const double> state) const;
  static void check_law(int law);

 private:
  Grid grid_;
};

/// u_t = omega u_x on a Dirichlet grid, centred differences in the interior.
/// Boundary values come from the closure g(x, t).
class AdvectionProblem final : public SemidiscreteProblem {
 public:
  using Closure = std::function<double(double x, double t)>;

  AdvectionProblem(Grid grid, double omega, Closure closure);

  ProblemId id() const override { return ProblemId::advection; }
  double omega() const { return omega_; }

  void rhs(double t, std::span<const double> state, std::span<double> out) const override;
  using SemidiscreteProblem::rhs;
  BandedMatrix jacobian(double t, std::span<const double> state) const override;
  std::size_t half_bandwidth() const override { return 1; }
  bool is_linear() const override { return true; }

  const std::array<ConservationLaw, 2>& laws() const override;
  std::vector<double> density(int law, std::span<const double> state) const override;
  MaskedField flux(int law, std::span<const double> state,
                   std::span<const double> state_dot) const override;

  std::vector<std::size_t> boundary_indices() const override;
  std::vector<double> boundary_values(double t) const override;

 private:
  double omega_;
  Closure closure_;
};

/// u_t + 6u^2 u_x + u_xxx = 0 in flux form. Values outside the grid are zero
/// on a zero_ghost grid and wrap around on a periodic one.
class MkdvProblem final : public SemidiscreteProblem {
 public:
  explicit MkdvProblem(Grid grid);

  ProblemId id() const override { return ProblemId::mkdv; }

  void rhs(double t, std::span<const double> state, std::span<double> out) const override;
  using SemidiscreteProblem::rhs;
  BandedMatrix jacobian(double t, std::span<const double> state) const override;
  std::size_t half_bandwidth() const override { return 2; }

  const std::array<ConservationLaw, 2>& laws() const override;
  std::vector<double> density(int law, std::span<const double> state) const override;
  MaskedField flux(int law, std::span<const double> state,
                   std::span<const double> state_dot) const override;

  /// Mass flux 2(mu U_{m-1}) mu(U_{m-1}^2) + D^2 mu U_{m-2} on nodes 0..M.
  std::vector<double> mass_flux(std::span<const double> state) const;
};

/// Real form of i psi_t + psi_xx + |psi|^2 psi = 0 with psi = u + i v on a
/// periodic grid. State layout (u_0, v_0, u_1, v_1, ...).
class NlsProblem final : public SemidiscreteProblem {
 public:
  explicit NlsProblem(Grid grid);

  ProblemId id() const override { return ProblemId::nls; }
  std::size_t components() const override { return 2; }

  void rhs(double t, std::span<const double> state, std::span<double> out) const override;
  using SemidiscreteProblem::rhs;
  BandedMatrix jacobian(double t, std::span<const double> state) const override;
  std::size_t half_bandwidth() const override { return 3; }

  const std::array<ConservationLaw, 2>& laws() const override;
  std::vector<double> density(int law, std::span<const double> state) const override;
  MaskedField flux(int law, std::span<const double> state,
                   std::span<const double> state_dot) const override;
  bool flux_needs_time_derivative(int law) const override { return law == 2; }
};

}  // namespace efit
