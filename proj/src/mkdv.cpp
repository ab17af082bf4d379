#include "efit/problems.hpp"

#include <stdexcept>

namespace efit {

namespace {

// State padded with two ghosts on each side, padded[k + 2] = U_k: zeros, or
// the wrapped values on a periodic grid.
std::vector<double> pad(std::span<const double> u, bool periodic) {
  const std::size_t n = u.size();
  std::vector<double> p(n + 4, 0.0);
  std::copy(u.begin(), u.end(), p.begin() + 2);
  if (periodic) {
    p[0] = u[n - 2];
    p[1] = u[n - 1];
    p[n + 2] = u[0];
    p[n + 3] = u[1];
  }
  return p;
}

}  // namespace

MkdvProblem::MkdvProblem(Grid grid) : SemidiscreteProblem(grid) {
  if (grid.topology() == Topology::dirichlet)
    throw std::invalid_argument("MkdvProblem: grid must use zero ghosts or be periodic");
}

std::vector<double> MkdvProblem::mass_flux(std::span<const double> u) const {
  const std::size_t n = u.size();
  const auto p = pad(u, grid().periodic());
  const double c = 1.0 / (2.0 * grid().dx() * grid().dx());
  std::vector<double> phi(n + 1);
  for (std::size_t m = 0; m <= n; ++m) {
    const double um2 = p[m], um1 = p[m + 1], um = p[m + 2], up1 = p[m + 3];
    phi[m] = 0.5 * (um + um1) * (um * um + um1 * um1) + c * (up1 - um - um1 + um2);
  }
  return phi;
}

void MkdvProblem::rhs(double, std::span<const double> u, std::span<double> out) const {
  check_state(u);
  const auto phi = mass_flux(u);
  const double inv_dx = 1.0 / grid().dx();
  for (std::size_t m = 0; m < u.size(); ++m) out[m] = -(phi[m + 1] - phi[m]) * inv_dx;
}

BandedMatrix MkdvProblem::jacobian(double, std::span<const double> u) const {
  check_state(u);
  const std::size_t n = u.size();
  const auto p = pad(u, grid().periodic());
  const double c = 1.0 / (2.0 * grid().dx() * grid().dx());
  const double inv_dx = 1.0 / grid().dx();

  // dPhi_m/dU_m and dPhi_m/dU_{m-1} for m = 0..n.
  std::vector<double> d_own(n + 1), d_prev(n + 1);
  for (std::size_t m = 0; m <= n; ++m) {
    const double um1 = p[m + 1], um = p[m + 2];
    const double sq = um * um + um1 * um1;
    d_own[m] = 0.5 * (sq + 2.0 * um * (um + um1)) - c;
    d_prev[m] = 0.5 * (sq + 2.0 * um1 * (um + um1)) - c;
  }

  BandedMatrix jac(n, 2, 2, grid().periodic());
  for (std::size_t m = 0; m < n; ++m) {
    const double row[5] = {c * inv_dx, -(c - d_prev[m]) * inv_dx,
                           -(d_prev[m + 1] - d_own[m]) * inv_dx, -(d_own[m + 1] - c) * inv_dx,
                           -c * inv_dx};
    for (std::ptrdiff_t d = -2; d <= 2; ++d)
      if (const auto j = jac.column(m, d)) jac.at(m, *j) = row[d + 2];
  }
  return jac;
}

const std::array<ConservationLaw, 2>& MkdvProblem::laws() const {
  static const std::array<ConservationLaw, 2> laws{{
      {"mass", DensityKind::linear, "Q = 1"},
      {"momentum", DensityKind::quadratic_homogeneous, "Q = U_m"},
  }};
  return laws;
}

std::vector<double> MkdvProblem::density(int law, std::span<const double> u) const {
  check_law(law);
  check_state(u);
  std::vector<double> g(u.begin(), u.end());
  if (law == 2)
    for (double& v : g) v = 0.5 * v * v;
  return g;
}

MaskedField MkdvProblem::flux(int law, std::span<const double> u, std::span<const double>) const {
  check_law(law);
  check_state(u);
  const std::size_t n = u.size();
  MaskedField f{std::vector<double>(n + 1), std::vector<unsigned char>(n + 1, 1)};
  if (law == 1) {
    f.values = mass_flux(u);
    return f;
  }
  const auto p = pad(u, grid().periodic());
  const double dx = grid().dx();
  const double c = 1.0 / (2.0 * dx * dx);
  for (std::size_t m = 0; m <= n; ++m) {
    const double um2 = p[m], um1 = p[m + 1], um = p[m + 2], up1 = p[m + 3];
    const double cubic = 0.5 * um1 * um * (um1 * um1 + um * um + um1 * um);
    const double dispersive = 0.5 * (um + um1) * c * (up1 - um - um1 + um2);
    const double gradient = 0.25 * ((um - um1) / dx) * ((um1 + up1 - um2 - um) / dx);
    f.values[m] = cubic + dispersive - gradient;
  }
  return f;
}

}  // namespace efit
