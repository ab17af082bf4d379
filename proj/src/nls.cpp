#include "efit/problems.hpp"

#include <stdexcept>

namespace efit {

namespace {

// Neighbour access on the periodic, interleaved (u, v) state.
struct PeriodicPair {
  std::span<const double> s;
  std::size_t nodes;

  std::size_t wrap(std::ptrdiff_t m) const {
    const auto n = static_cast<std::ptrdiff_t>(nodes);
    const std::ptrdiff_t r = m % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
  }
  double u(std::ptrdiff_t m) const { return s[2 * wrap(m)]; }
  double v(std::ptrdiff_t m) const { return s[2 * wrap(m) + 1]; }
};

}  // namespace

NlsProblem::NlsProblem(Grid grid) : SemidiscreteProblem(grid) {
  if (!grid.periodic()) throw std::invalid_argument("NlsProblem: grid must be periodic");
}

void NlsProblem::rhs(double, std::span<const double> state, std::span<double> out) const {
  check_state(state);
  const PeriodicPair z{state, grid().size()};
  const double inv_dx2 = 1.0 / (grid().dx() * grid().dx());
  const auto n = static_cast<std::ptrdiff_t>(grid().size());
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    const double u = z.u(m), v = z.v(m);
    const double s = 0.5 * (u * (z.u(m - 1) + z.u(m + 1)) + v * (z.v(m - 1) + z.v(m + 1)));
    const double lap_u = (z.u(m + 1) - 2.0 * u + z.u(m - 1)) * inv_dx2;
    const double lap_v = (z.v(m + 1) - 2.0 * v + z.v(m - 1)) * inv_dx2;
    out[2 * static_cast<std::size_t>(m)] = -lap_v - s * v;
    out[2 * static_cast<std::size_t>(m) + 1] = lap_u + s * u;
  }
}

BandedMatrix NlsProblem::jacobian(double, std::span<const double> state) const {
  check_state(state);
  const PeriodicPair z{state, grid().size()};
  const double inv_dx2 = 1.0 / (grid().dx() * grid().dx());
  const std::size_t nodes = grid().size();
  BandedMatrix jac(2 * nodes, 3, 3, true);
  for (std::size_t mm = 0; mm < nodes; ++mm) {
    const auto m = static_cast<std::ptrdiff_t>(mm);
    const double u = z.u(m), v = z.v(m);
    const double su = 0.5 * (z.u(m - 1) + z.u(m + 1));
    const double sv = 0.5 * (z.v(m - 1) + z.v(m + 1));
    const double s = u * su + v * sv;
    const std::size_t ru = 2 * mm, rv = 2 * mm + 1;
    for (const std::ptrdiff_t side : {-1, 1}) {
      const std::size_t k = z.wrap(m + side);
      // du_m row
      jac.at(ru, 2 * k + 1) += -inv_dx2 - 0.5 * v * v;
      jac.at(ru, 2 * k) += -0.5 * u * v;
      // dv_m row
      jac.at(rv, 2 * k) += inv_dx2 + 0.5 * u * u;
      jac.at(rv, 2 * k + 1) += 0.5 * v * u;
    }
    jac.at(ru, ru) += -su * v;
    jac.at(ru, rv) += 2.0 * inv_dx2 - s - v * sv;
    jac.at(rv, ru) += -2.0 * inv_dx2 + s + u * su;
    jac.at(rv, rv) += sv * u;
  }
  return jac;
}

const std::array<ConservationLaw, 2>& NlsProblem::laws() const {
  static const std::array<ConservationLaw, 2> laws{{
      {"charge", DensityKind::quadratic_homogeneous, "Q = (2 U_m, -2 V_m)"},
      {"momentum", DensityKind::quadratic_homogeneous,
       "Q = (2 D mu V_{m-1}, 2 D mu U_{m-1})"},
  }};
  return laws;
}

std::vector<double> NlsProblem::density(int law, std::span<const double> state) const {
  check_law(law);
  check_state(state);
  const PeriodicPair z{state, grid().size()};
  const double inv_2dx = 1.0 / (2.0 * grid().dx());
  const auto n = static_cast<std::ptrdiff_t>(grid().size());
  std::vector<double> g(grid().size());
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    const double u = z.u(m), v = z.v(m);
    g[static_cast<std::size_t>(m)] =
        law == 1 ? u * u + v * v
                 : u * (z.v(m + 1) - z.v(m - 1)) * inv_2dx - v * (z.u(m + 1) - z.u(m - 1)) * inv_2dx;
  }
  return g;
}

MaskedField NlsProblem::flux(int law, std::span<const double> state,
                             std::span<const double> state_dot) const {
  check_law(law);
  check_state(state);
  if (law == 2 && state_dot.size() != state.size())
    throw std::invalid_argument("NlsProblem::flux: momentum flux needs the state time derivative");
  const PeriodicPair z{state, grid().size()};
  const double dx = grid().dx();
  const std::size_t nodes = grid().size();
  MaskedField f{std::vector<double>(nodes + 1), std::vector<unsigned char>(nodes + 1, 1)};
  for (std::size_t mm = 0; mm <= nodes; ++mm) {
    const auto m = static_cast<std::ptrdiff_t>(mm);
    const double u = z.u(m), v = z.v(m), ul = z.u(m - 1), vl = z.v(m - 1);
    const double mu_u = 0.5 * (u + ul), mu_v = 0.5 * (v + vl);
    const double d_u = (u - ul) / dx, d_v = (v - vl) / dx;
    if (law == 1) {
      f.values[mm] = 2.0 * mu_u * d_v - 2.0 * d_u * mu_v;
      continue;
    }
    const PeriodicPair zd{state_dot, nodes};
    const double ud = zd.u(m), vd = zd.v(m), udl = zd.u(m - 1), vdl = zd.v(m - 1);
    const double mu_ud = 0.5 * (ud + udl), mu_vd = 0.5 * (vd + vdl);
    const double d_ud = (ud - udl) / dx, d_vd = (vd - vdl) / dx;
    const double coupling = u * ul + v * vl;
    f.values[mm] = d_u * d_u + d_v * d_v + mu_v * mu_ud - mu_u * mu_vd +
                   0.5 * coupling * coupling -
                   0.25 * dx * dx * (d_ud * d_v - d_vd * d_u);
  }
  return f;
}

}  // namespace efit
