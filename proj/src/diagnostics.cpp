#include "efit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace efit {

namespace {

std::vector<double> scaled(std::span<const double> v, double factor) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x *= factor;
  return out;
}

const std::vector<double>& stage_of(const Trajectory& traj, std::size_t n,
                                    std::vector<double>& scratch) {
  if (traj.tableau.stages != 1)
    throw std::invalid_argument("residual_field: only one-stage runs carry a single stage");
  if (n < traj.stages.size()) return traj.stages[n];
  if (!traj.tableau.is_midpoint_form())
    throw std::invalid_argument("residual_field: stage not retained and not reconstructible");
  const auto& u0 = traj.states[n];
  const auto& u1 = traj.states[n + 1];
  scratch.resize(u0.size());
  const double half_gamma = 0.5 * traj.tableau.gamma[0];
  for (std::size_t i = 0; i < u0.size(); ++i) scratch[i] = half_gamma * (u1[i] + u0[i]);
  return scratch;
}

}  // namespace

MaskedField residual_field(const Trajectory& traj, int law, std::size_t n) {
  if (!traj.problem) throw std::invalid_argument("residual_field: trajectory has no problem");
  if (law != 1 && law != 2) throw std::invalid_argument("residual_field: law must be 1 or 2");
  if (n >= traj.steps()) throw std::out_of_range("residual_field: step index out of range");
  const SemidiscreteProblem& problem = *traj.problem;

  std::vector<double> scratch;
  const auto& stage = stage_of(traj, n, scratch);
  const double gamma = traj.tableau.gamma[0];
  const double weight = gamma * traj.tableau.b[0];
  const double t_stage = traj.time(n) + traj.tableau.c[0] * traj.dt;

  const auto stage_dot = problem.rhs(t_stage, stage);
  const MaskedField flux = problem.flux(law, stage, stage_dot);
  const auto g_next = problem.density(law, scaled(traj.states[n + 1], gamma));
  const auto g_now = problem.density(law, scaled(traj.states[n], gamma));

  const std::size_t nodes = problem.grid().size();
  const double dx = problem.grid().dx();
  MaskedField out{std::vector<double>(nodes, 0.0), std::vector<unsigned char>(nodes, 0)};
  for (std::size_t m = 0; m < nodes; ++m) {
    if (!flux.valid[m] || !flux.valid[m + 1]) continue;
    out.values[m] = (g_next[m] - g_now[m]) / traj.dt +
                    weight * (flux.values[m + 1] - flux.values[m]) / dx;
    out.valid[m] = 1;
  }
  return out;
}

double err_invariant(const Trajectory& traj, int law) {
  if (!traj.problem) throw std::invalid_argument("err_invariant: trajectory has no problem");
  const SemidiscreteProblem& problem = *traj.problem;
  if (problem.grid().topology() == Topology::dirichlet)
    throw std::invalid_argument("err_invariant: Dirichlet problems use err_local");
  const auto initial = problem.density(law, traj.states.front());
  double worst = 0.0;
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const auto g = problem.density(law, traj.states[n]);
    double sum = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m) sum += g[m] - initial[m];
    worst = std::max(worst, std::abs(sum));
  }
  return problem.grid().dx() * worst;
}

double err_local(const Trajectory& traj, int law) {
  double worst = 0.0;
  for (std::size_t n = 0; n < traj.steps(); ++n)
    worst = std::max(worst, residual_field(traj, law, n).max_abs());
  return worst;
}

double conservation_error(const Trajectory& traj, int law) {
  if (!traj.problem) throw std::invalid_argument("conservation_error: trajectory has no problem");
  return traj.problem->grid().topology() == Topology::dirichlet ? err_local(traj, law)
                                                               : err_invariant(traj, law);
}

double solution_error(const Trajectory& traj, const ExactSolution& exact) {
  if (!traj.problem || traj.states.empty())
    throw std::invalid_argument("solution_error: empty trajectory");
  const auto& final_state = traj.states.back();
  const auto reference = exact.sample(traj.problem->grid(), traj.time(traj.steps()));
  if (reference.size() != final_state.size())
    throw std::invalid_argument("solution_error: exact solution has the wrong component count");
  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = final_state[i] - reference[i];
    diff2 += d * d;
    ref2 += reference[i] * reference[i];
  }
  if (ref2 == 0.0) throw std::domain_error("solution_error: exact solution has zero norm");
  return std::sqrt(diff2 / ref2);
}

double estimate_order(double err1, double err2, double dt1, double dt2) {
  if (!(err1 > 0.0) || !(err2 > 0.0) || !(dt1 > 0.0) || !(dt2 > 0.0))
    throw std::domain_error("estimate_order: inputs must be positive");
  if (dt1 == dt2) throw std::domain_error("estimate_order: step sizes must differ");
  return std::log(err1 / err2) / std::log(dt1 / dt2);
}

}  // namespace efit
