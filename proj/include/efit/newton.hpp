#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "efit/banded.hpp"

namespace efit {

enum class JacobianMode { analytic_banded, finite_difference_banded };

struct SolverOptions {
  double rel_tol = 1e-14;
  double abs_tol = 1e-12;
  int max_iters = 25;
  JacobianMode jacobian_mode = JacobianMode::analytic_banded;
  /// Half-bandwidth used by the finite-difference Jacobian.
  std::size_t bandwidth = 1;
  /// Whether the finite-difference Jacobian wraps around (periodic stencils).
  bool periodic = false;
  /// Residual level set by rounding errors. Below it the iteration also stops
  /// once a step fails to halve the residual. 0 disables the rule.
  double roundoff_floor = 0.0;

  void validate() const;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(int iterations, double residual_norm);
  int iterations() const { return iterations_; }
  double residual_norm() const { return residual_norm_; }

 private:
  int iterations_;
  double residual_norm_;
};

using ResidualFn = std::function<void(std::span<const double> x, std::span<double> r)>;
using JacobianFn = std::function<BandedMatrix(std::span<const double> x)>;

struct NewtonResult {
  std::vector<double> x;
  int iterations = 0;
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
};

/// Plain Newton iteration on a banded system.
///
/// Stops once ||r(x)||_inf <= abs_tol + rel_tol * ||r(guess)||_inf, or once
/// the residual is under opts.roundoff_floor and stagnates. When
/// `frozen` is given it is used as the Jacobian factorization for every
/// iteration (affine residuals) and `jacobian` is never called.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          std::vector<double> guess, const SolverOptions& opts,
                          const BandedLU* frozen = nullptr);

/// Banded Jacobian of `residual` at x by forward differences with column
/// colouring; step h_j = sqrt(eps) * (1 + |x_j|).
BandedMatrix fd_banded_jacobian(const ResidualFn& residual, std::span<const double> x,
                                std::size_t half_bandwidth, bool periodic);

}  // namespace efit
