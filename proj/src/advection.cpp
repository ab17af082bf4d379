#include "efit/problems.hpp"

#include <stdexcept>
#include <string>

namespace efit {

std::string_view to_string(ProblemId id) {
  switch (id) {
    case ProblemId::advection:
      return "advection";
    case ProblemId::mkdv:
      return "mkdv";
    case ProblemId::nls:
      return "nls";
  }
  return "unknown";
}

ProblemId parse_problem_id(std::string_view text) {
  if (text == "advection") return ProblemId::advection;
  if (text == "mkdv") return ProblemId::mkdv;
  if (text == "nls") return ProblemId::nls;
  throw std::invalid_argument("unknown problem id '" + std::string(text) + "'");
}

std::vector<double> SemidiscreteProblem::rhs(double t, std::span<const double> state) const {
  std::vector<double> out(state_size());
  rhs(t, state, out);
  return out;
}

const ConservationLaw& SemidiscreteProblem::law(int index) const {
  check_law(index);
  return laws()[static_cast<std::size_t>(index - 1)];
}

void SemidiscreteProblem::check_state(std::span<const double> state) const {
  if (state.size() != state_size())
    throw std::invalid_argument("state length " + std::to_string(state.size()) +
                                " does not match " + std::to_string(state_size()));
}

void SemidiscreteProblem::check_law(int law) {
  if (law != 1 && law != 2)
    throw std::invalid_argument("conservation law index must be 1 or 2, got " +
                                std::to_string(law));
}

AdvectionProblem::AdvectionProblem(Grid grid, double omega, Closure closure)
    : SemidiscreteProblem(grid), omega_(omega), closure_(std::move(closure)) {
  if (grid.topology() != Topology::dirichlet)
    throw std::invalid_argument("AdvectionProblem: grid must be Dirichlet");
  if (!closure_) throw std::invalid_argument("AdvectionProblem: missing boundary closure");
}

void AdvectionProblem::rhs(double, std::span<const double> u, std::span<double> out) const {
  check_state(u);
  const std::size_t n = u.size();
  const double scale = omega_ / (2.0 * grid().dx());
  out[0] = 0.0;
  out[n - 1] = 0.0;
  for (std::size_t m = 1; m + 1 < n; ++m) out[m] = scale * (u[m + 1] - u[m - 1]);
}

BandedMatrix AdvectionProblem::jacobian(double, std::span<const double> u) const {
  check_state(u);
  const std::size_t n = u.size();
  BandedMatrix jac(n, 1, 1);
  const double scale = omega_ / (2.0 * grid().dx());
  for (std::size_t m = 1; m + 1 < n; ++m) {
    jac.at(m, m + 1) = scale;
    jac.at(m, m - 1) = -scale;
  }
  return jac;
}

const std::array<ConservationLaw, 2>& AdvectionProblem::laws() const {
  static const std::array<ConservationLaw, 2> laws{{
      {"mass", DensityKind::linear, "Q = 1"},
      {"momentum", DensityKind::quadratic_homogeneous, "Q = U_m"},
  }};
  return laws;
}

std::vector<double> AdvectionProblem::density(int law, std::span<const double> u) const {
  check_law(law);
  check_state(u);
  std::vector<double> g(u.begin(), u.end());
  if (law == 2)
    for (double& v : g) v = 0.5 * v * v;
  return g;
}

MaskedField AdvectionProblem::flux(int law, std::span<const double> u,
                                   std::span<const double>) const {
  check_law(law);
  check_state(u);
  const std::size_t n = u.size();
  MaskedField f{std::vector<double>(n + 1, 0.0), std::vector<unsigned char>(n + 1, 0)};
  // F_m references nodes m-1 and m.
  for (std::size_t m = 1; m < n; ++m) {
    f.values[m] = law == 1 ? -omega_ * 0.5 * (u[m] + u[m - 1])
                           : -0.5 * omega_ * u[m] * u[m - 1];
    f.valid[m] = 1;
  }
  return f;
}

std::vector<std::size_t> AdvectionProblem::boundary_indices() const {
  return {0, grid().size() - 1};
}

std::vector<double> AdvectionProblem::boundary_values(double t) const {
  return {closure_(grid().a(), t), closure_(grid().node(grid().size() - 1), t)};
}

}  // namespace efit
