#include "efit/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace efit {

void SolverOptions::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("SolverOptions: tolerances must be positive");
  if (max_iters < 1) throw std::invalid_argument("SolverOptions: max_iters must be >= 1");
  if (bandwidth < 1) throw std::invalid_argument("SolverOptions: bandwidth must be >= 1");
  if (!(roundoff_floor >= 0.0))
    throw std::invalid_argument("SolverOptions: roundoff_floor must be non-negative");
}

namespace {

std::string describe(int iterations, double residual_norm) {
  std::ostringstream os;
  os << "Newton failed to converge after " << iterations
     << " iterations (residual " << residual_norm << ")";
  return os.str();
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

NonConvergenceError::NonConvergenceError(int iterations, double residual_norm)
    : std::runtime_error(describe(iterations, residual_norm)),
      iterations_(iterations),
      residual_norm_(residual_norm) {}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          std::vector<double> guess, const SolverOptions& opts,
                          const BandedLU* frozen) {
  opts.validate();
  for (double v : guess)
    if (!std::isfinite(v)) throw std::invalid_argument("newton_solve: non-finite guess");

  NewtonResult result;
  result.x = std::move(guess);
  std::vector<double> r(result.x.size());
  residual(result.x, r);
  result.initial_residual_norm = inf_norm(r);
  result.residual_norm = result.initial_residual_norm;
  const double target = opts.abs_tol + opts.rel_tol * result.initial_residual_norm;

  bool stagnated = false;
  while (result.residual_norm > target && !stagnated) {
    if (result.iterations >= opts.max_iters || !std::isfinite(result.residual_norm)) {
      if (result.residual_norm <= opts.roundoff_floor) break;
      throw NonConvergenceError(result.iterations, result.residual_norm);
    }

    std::vector<double> delta;
    if (frozen != nullptr) {
      delta = frozen->solve(r);
    } else if (opts.jacobian_mode == JacobianMode::finite_difference_banded) {
      delta = banded_lu_solve(fd_banded_jacobian(residual, result.x, opts.bandwidth, opts.periodic), r);
    } else {
      delta = banded_lu_solve(jacobian(result.x), r);
    }
    for (std::size_t i = 0; i < delta.size(); ++i) result.x[i] -= delta[i];
    ++result.iterations;
    residual(result.x, r);
    const double previous = result.residual_norm;
    result.residual_norm = inf_norm(r);
    stagnated = result.residual_norm <= opts.roundoff_floor && result.residual_norm > 0.5 * previous;
  }
  return result;
}

BandedMatrix fd_banded_jacobian(const ResidualFn& residual, std::span<const double> x,
                                std::size_t half_bandwidth, bool periodic) {
  const std::size_t n = x.size();
  BandedMatrix jac(n, half_bandwidth, half_bandwidth, periodic);
  std::vector<double> base(n), shifted(n), probe(x.begin(), x.end());
  residual(x, base);

  // Columns closer than 2w+1 apart (cyclically, when periodic) share rows.
  const std::size_t stride = 2 * half_bandwidth + 1;
  const std::size_t full = periodic ? (n / stride) * stride : n;
  std::vector<std::vector<std::size_t>> colours(stride);
  for (std::size_t j = 0; j < full; ++j) colours[j % stride].push_back(j);
  for (std::size_t j = full; j < n; ++j) colours.push_back({j});

  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const auto w = static_cast<std::ptrdiff_t>(half_bandwidth);
  for (const auto& group : colours) {
    if (group.empty()) continue;
    std::vector<double> steps(group.size());
    for (std::size_t k = 0; k < group.size(); ++k) {
      const std::size_t j = group[k];
      steps[k] = root_eps * (1.0 + std::abs(x[j]));
      probe[j] = x[j] + steps[k];
      steps[k] = probe[j] - x[j];
    }
    residual(probe, shifted);
    for (std::size_t k = 0; k < group.size(); ++k) {
      const std::size_t j = group[k];
      for (std::ptrdiff_t d = -w; d <= w; ++d) {
        const auto i = jac.column(j, d);  // rows coupled to column j
        if (!i) continue;
        jac.at(*i, j) = (shifted[*i] - base[*i]) / steps[k];
      }
      probe[j] = x[j];
    }
  }
  return jac;
}

}  // namespace efit
