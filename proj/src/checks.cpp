#include "efit/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>

#include "efit/banded.hpp"
#include "efit/diagnostics.hpp"
#include "efit/efrk.hpp"
#include "efit/problems.hpp"

namespace efit {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Smooth random state: a few low modes with random amplitudes.
std::vector<double> smooth_state(const SemidiscreteProblem& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const Grid& g = p.grid();
  const double len = g.b() - g.a();
  std::vector<double> s(p.state_size());
  for (std::size_t c = 0; c < p.components(); ++c) {
    const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double x = 2.0 * M_PI * (g.node(m) - g.a()) / len;
      double v = a1 * std::sin(x) + a2 * std::cos(2.0 * x) + a3 * std::sin(3.0 * x);
      if (g.topology() == Topology::zero_ghost) v *= std::sin(0.5 * x) * std::sin(0.5 * x);
      s[m * p.components() + c] = v;
    }
  }
  return s;
}

// Max |grad G . f + D_x F| over valid nodes, relative to the largest term.
double semidiscrete_defect(const SemidiscreteProblem& p, int law, const std::vector<double>& s) {
  const std::vector<double> f = p.rhs(0.0, s);
  const double h = 1e-6;
  std::vector<double> plus(s.size()), minus(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    plus[k] = s[k] + h * f[k];
    minus[k] = s[k] - h * f[k];
  }
  const auto gp = p.density(law, plus);
  const auto gm = p.density(law, minus);
  const MaskedField flux = p.flux(law, s, f);
  const double dx = p.grid().dx();
  double worst = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < p.grid().size(); ++m) {
    if (!flux.valid[m] || !flux.valid[m + 1]) continue;
    const double dg = (gp[m] - gm[m]) / (2.0 * h);
    const double df = (flux.values[m + 1] - flux.values[m]) / dx;
    worst = std::max(worst, std::abs(dg + df));
    scale = std::max({scale, std::abs(dg), std::abs(df)});
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

std::vector<std::shared_ptr<SemidiscreteProblem>> coarse_problems() {
  auto closure = [](double x, double t) { return std::sin(x + 2.0 * t); };
  return {
      std::make_shared<AdvectionProblem>(Grid::with_nodes(-1.0, 1.0, 33, Topology::dirichlet), 2.0,
                                         closure),
      std::make_shared<MkdvProblem>(Grid::with_nodes(-4.0, 4.0, 41, Topology::zero_ghost)),
      std::make_shared<NlsProblem>(Grid::with_nodes(-M_PI, M_PI, 32, Topology::periodic)),
  };
}

CheckResult check_symplectic_dichotomy() {
  double worst_ef = 0.0, best_c03 = 1e300;
  for (double nu : {0.01, 0.1, 1.0, 3.0}) {
    worst_ef = std::max(worst_ef, is_symplectic(ef_midpoint(nu), 1e-12).max_defect);
    best_c03 = std::min(best_c03, is_symplectic(one_stage_ef_coeffs(nu, 0.3), 1e-12).max_defect);
  }
  return {"symplecticity dichotomy", worst_ef <= 1e-12 && best_c03 > 1e-12,
          "EF defect " + sci(worst_ef) + ", c1=0.3 defect " + sci(best_c03)};
}

// u' = -omega v, v' = omega u at every node of a small periodic grid.
class RotationProblem final : public SemidiscreteProblem {
 public:
  explicit RotationProblem(double omega)
      : SemidiscreteProblem(Grid::with_nodes(0.0, 1.0, 5, Topology::periodic)), omega_(omega) {}
  ProblemId id() const override { return ProblemId::nls; }
  std::size_t components() const override { return 2; }
  void rhs(double, std::span<const double> s, std::span<double> out) const override {
    for (std::size_t k = 0; k < s.size(); k += 2) {
      out[k] = -omega_ * s[k + 1];
      out[k + 1] = omega_ * s[k];
    }
  }
  using SemidiscreteProblem::rhs;
  BandedMatrix jacobian(double, std::span<const double> s) const override {
    BandedMatrix j(s.size(), 1, 1, true);
    for (std::size_t k = 0; k < s.size(); k += 2) {
      j.at(k, k + 1) = -omega_;
      j.at(k + 1, k) = omega_;
    }
    return j;
  }
  std::size_t half_bandwidth() const override { return 1; }
  bool is_linear() const override { return true; }
  const std::array<ConservationLaw, 2>& laws() const override {
    static const std::array<ConservationLaw, 2> l{
        ConservationLaw{"none", DensityKind::linear, ""},
        ConservationLaw{"radius", DensityKind::quadratic_homogeneous, ""}};
    return l;
  }
  std::vector<double> density(int, std::span<const double> s) const override {
    return std::vector<double>(s.size() / 2, 0.0);
  }
  MaskedField flux(int, std::span<const double> s, std::span<const double>) const override {
    MaskedField f;
    f.values.assign(s.size() / 2 + 1, 0.0);
    f.valid.assign(s.size() / 2 + 1, 1);
    return f;
  }

 private:
  double omega_;
};

CheckResult check_rotation_exactness() {
  const double omega = 5.0, nu = 0.5;
  auto p = std::make_shared<RotationProblem>(omega);
  std::vector<double> u0(p->state_size());
  for (std::size_t k = 0; k < u0.size(); k += 2) {
    u0[k] = std::cos(0.3 * static_cast<double>(k));
    u0[k + 1] = std::sin(0.3 * static_cast<double>(k));
  }
  const double dt = nu / omega;
  const auto traj = integrate(Scheme::ef(), p, u0, 0.0, 1000 * dt, dt, omega);
  const double t = traj.time(traj.steps());
  double err = 0.0, norm = 0.0;
  const auto& last = traj.states.back();
  for (std::size_t k = 0; k < u0.size(); k += 2) {
    const double eu = std::cos(omega * t) * u0[k] - std::sin(omega * t) * u0[k + 1];
    const double ev = std::sin(omega * t) * u0[k] + std::cos(omega * t) * u0[k + 1];
    err += (last[k] - eu) * (last[k] - eu) + (last[k + 1] - ev) * (last[k + 1] - ev);
    norm += eu * eu + ev * ev;
  }
  const double rel = std::sqrt(err / norm);
  return {"rotation exactness (1000 EF steps, nu = 0.5)", rel <= 1e-12, "relative error " + sci(rel)};
}

CheckResult check_small_nu_limit() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (const auto& p : coarse_problems()) {
    const auto s = smooth_state(*p, rng);
    const auto a = step(ef_midpoint(1e-8), *p, s, 0.0, 1e-3);
    const auto b = step(classic_midpoint(), *p, s, 0.0, 1e-3);
    double diff = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) diff = std::max(diff, std::abs(a.u_next[k] - b.u_next[k]));
    worst = std::max(worst, diff / max_abs(s));
  }
  return {"nu -> 0 consistency", worst <= 1e-12, "max relative gap " + sci(worst)};
}

CheckResult check_semidiscrete_laws() {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (const auto& p : coarse_problems())
    for (int law : {1, 2}) worst = std::max(worst, semidiscrete_defect(*p, law, smooth_state(*p, rng)));
  return {"semidiscrete conservation laws", worst <= 1e-7, "max relative defect " + sci(worst)};
}

CheckResult check_jacobians() {
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (const auto& p : coarse_problems()) {
    const auto s = smooth_state(*p, rng);
    const BandedMatrix analytic = p->jacobian(0.0, s);
    const auto f0 = p->rhs(0.0, s);
    const std::size_t n = s.size();
    for (std::size_t j = 0; j < n; ++j) {
      auto sp = s, sm = s;
      const double h = 1e-6 * (1.0 + std::abs(s[j]));
      sp[j] += h;
      sm[j] -= h;
      const auto fp = p->rhs(0.0, sp), fm = p->rhs(0.0, sm);
      for (std::size_t i = 0; i < n; ++i) {
        const double fd = (fp[i] - fm[i]) / (2.0 * h);
        const double an = analytic(i, j);
        worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
    }
  }
  return {"analytic vs finite-difference Jacobians", worst <= 1e-6, "max relative gap " + sci(worst)};
}

CheckResult check_banded_solver() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (bool periodic : {false, true})
    for (std::size_t n : {12u, 31u, 50u}) {
      BandedMatrix A(n, 2, 3, periodic);
      for (std::size_t i = 0; i < n; ++i)
        for (std::ptrdiff_t d = -2; d <= 3; ++d)
          if (auto j = A.column(i, d)) A.at(i, *j) = d == 0 ? 8.0 + u(rng) : u(rng);
      std::vector<double> rhs(n);
      for (auto& r : rhs) r = u(rng);
      const auto x = banded_lu_solve(A, rhs);
      const auto back = A.multiply(x);
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(back[i] - rhs[i]));
      worst = std::max(worst, res / max_abs(rhs));
    }
  return {"banded LU residual", worst <= 1e-12, "max relative residual " + sci(worst)};
}

CheckResult check_discrete_laws() {
  // Mass conserved by any one-stage method; momentum only by c1 = 1/2.
  auto closure = [](double x, double t) { return std::sin(x + 5.0 * t); };
  auto p = std::make_shared<AdvectionProblem>(Grid::with_nodes(-1.0, 1.0, 201, Topology::dirichlet),
                                              5.0, closure);
  const auto u0 = [&] {
    std::vector<double> s(p->state_size());
    for (std::size_t m = 0; m < s.size(); ++m) s[m] = closure(p->grid().node(m), 0.0);
    return s;
  }();
  const auto ef = integrate(Scheme::ef(), p, u0, 0.0, 0.1, 0.01, 5.0);
  const auto c03 = integrate(Scheme::ef_c1(0.3), p, u0, 0.0, 0.1, 0.01, 5.0);
  const double ef_mom = err_local(ef, 2);
  const double c_mass = err_local(c03, 1), c_mom = err_local(c03, 2);
  const bool ok = ef_mom <= 1e-10 && c_mass <= 1e-10 && c_mom >= 1e3 * std::max(c_mass, 1e-300);
  return {"fully discrete laws (EF vs c1 = 0.3)", ok,
          "EF momentum " + sci(ef_mom) + ", c1=0.3 mass " + sci(c_mass) + " momentum " + sci(c_mom)};
}

}  // namespace

std::vector<CheckResult> run_property_checks() {
  const std::vector<std::function<CheckResult()>> checks{
      check_symplectic_dichotomy, check_rotation_exactness, check_small_nu_limit,
      check_semidiscrete_laws,    check_jacobians,          check_banded_solver,
      check_discrete_laws};
  std::vector<CheckResult> out;
  for (const auto& c : checks) {
    try {
      out.push_back(c());
    } catch (const std::exception& e) {
      out.push_back({"(check threw)", false, e.what()});
    }
  }
  return out;
}

}  // namespace efit
