#pragma once

#include <cstddef>
#include <optional>

#include "efit/efrk.hpp"
#include "efit/exact.hpp"
#include "efit/grid.hpp"

namespace efit {

/// Fully discrete divergence of conservation law `law` over step n -> n+1:
///
///   [G_m(gamma u_{n+1}) - G_m(gamma u_n)]/dt + [Phi_{m+1} - Phi_m]/dx,
///   Phi_m = gamma b F_m(Y, f(Y)),
///
/// with Y the retained stage of a one-stage run. Nodes whose flux stencil
/// left a bounded grid are masked.
MaskedField residual_field(const Trajectory& traj, int law, std::size_t n);

/// dx * max_n |sum_m (G_m(u_n) - G_m(u_0))| for periodic or zero-ghost grids.
double err_invariant(const Trajectory& traj, int law);

/// max over steps and valid nodes of |residual_field|.
double err_local(const Trajectory& traj, int law);

/// err_invariant on periodic/zero-ghost grids, err_local on Dirichlet grids.
double conservation_error(const Trajectory& traj, int law);

/// Relative Euclidean error of the final state,
/// sqrt(sum_c ||x_c - exact_c||^2 / sum_c ||exact_c||^2) over components.
double solution_error(const Trajectory& traj, const ExactSolution& exact);

/// log(err1/err2) / log(dt1/dt2).
double estimate_order(double err1, double err2, double dt1, double dt2);

}  // namespace efit
