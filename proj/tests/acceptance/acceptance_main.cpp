// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "efit/banded.hpp"
#include "efit/diagnostics.hpp"
#include "efit/efrk.hpp"
#include "efit/experiment.hpp"
#include "efit/problems.hpp"

using namespace efit;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const ReportRow* find_row(const ExperimentReport& r, const std::string& scheme, int n) {
  for (const auto* row : r.column(scheme))
    if (row->n == n) return row;
  return nullptr;
}

/// Compares a Sol err column with reference values and returns the worst
/// relative deviation (infinity for a missing or failed row).
double column_deviation(const ExperimentReport& r, const std::string& scheme,
                        const std::vector<double>& expected, int first_n = 0) {
  double worst = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const auto* row = find_row(r, scheme, first_n + static_cast<int>(k));
    if (!row || row->failed) return INFINITY;
    worst = std::max(worst, std::abs(row->sol_err - expected[k]) / expected[k]);
  }
  return worst;
}

double max_err(const ExperimentReport& r) {
  double worst = 0.0;
  for (const auto& row : r.rows) worst = std::max({worst, row.failed ? INFINITY : row.err1, row.err2});
  return worst;
}

Outcome table1() {
  Stopwatch clock;
  const auto r = run_experiment(table_config(1, 5));
  const double secs = clock.seconds();
  const double classic = column_deviation(r, "classic", {4.45e-2, 1.10e-2, 2.74e-3, 6.85e-4, 1.71e-4, 4.31e-5});
  const double ef = column_deviation(r, "ef", {3.50e-7, 3.50e-7, 3.50e-7, 3.50e-7}, 2);
  const double err = max_err(r);
  const bool ok = classic <= 0.02 && ef <= 0.02 && err <= 1e-10 && secs <= 120.0;
  return {ok, "classic dev " + sci(classic) + ", EF dev (n>=2) " + sci(ef) + ", max Err " + sci(err) +
                  ", " + sci(secs) + " s"};
}

Outcome table2() {
  const auto r = run_experiment(table_config(2, 4));
  const auto* c0 = find_row(r, "classic", 0);
  const auto* e0 = find_row(r, "ef", 0);
  if (!c0 || !e0 || c0->failed || e0->failed) return {false, "n = 0 row failed"};
  const double ratio = c0->sol_err / e0->sol_err;
  std::string orders;
  bool orders_ok = true;
  for (const std::string scheme : {"classic", "ef"})
    for (int n = 1; n <= 3; ++n) {
      const auto* a = find_row(r, scheme, n - 1);
      const auto* b = find_row(r, scheme, n);
      const double p = estimate_order(a->sol_err, b->sol_err, a->dt, b->dt);
      orders_ok = orders_ok && p > 1.85 && p < 2.05;
      orders += " " + sci(p);
    }
  const bool ok = within(ratio, 15.9, 0.10) && orders_ok;
  return {ok, "classic/EF ratio at n=0 " + sci(ratio) + " (classic " + sci(c0->sol_err) + ", EF " +
                  sci(e0->sol_err) + "), orders n=1..3 (classic, ef):" + orders};
}

Outcome table3() {
  Stopwatch clock;
  const auto r = run_experiment(table_config(3, 3));
  const double secs = clock.seconds();
  const double classic = column_deviation(r, "classic", {5.66e-1, 1.62e-1, 3.97e-2, 8.72e-3});
  const double ef = column_deviation(r, "ef", {2.48e-1, 7.05e-2, 1.61e-2, 4.97e-3});
  const double err = max_err(r);
  const bool ok = classic <= 0.05 && ef <= 0.05 && err <= 1e-9 && secs <= 300.0;
  return {ok, "classic dev " + sci(classic) + ", EF dev " + sci(ef) + ", max Err " + sci(err) + ", " +
                  sci(secs) + " s"};
}

Outcome table4() {
  Stopwatch clock;
  const auto r = run_experiment(table_config(4, 4));
  const double secs = clock.seconds();
  const double classic = column_deviation(r, "classic", {1.49e-1, 1.70e-1, 5.66e-2, 1.52e-2, 4.09e-3});
  const double ef = column_deviation(r, "ef", {6.72e-2, 1.85e-2, 4.97e-3, 1.49e-3, 6.23e-4});
  const double err = max_err(r);
  const bool ok = classic <= 0.05 && ef <= 0.05 && err <= 1e-11 && secs <= 600.0;
  return {ok, "classic dev " + sci(classic) + ", EF dev " + sci(ef) + ", max Err " + sci(err) + ", " +
                  sci(secs) + " s"};
}

/// u' = -omega v, v' = omega u at each node of a 5-node periodic grid.
class Rotation final : public SemidiscreteProblem {
 public:
  explicit Rotation(double omega)
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
    static const std::array<ConservationLaw, 2> l{ConservationLaw{"-", DensityKind::linear, ""},
                                                  ConservationLaw{"-", DensityKind::quadratic_homogeneous, ""}};
    return l;
  }
  std::vector<double> density(int, std::span<const double> s) const override {
    return std::vector<double>(s.size() / 2, 0.0);
  }
  MaskedField flux(int, std::span<const double> s, std::span<const double>) const override {
    return {std::vector<double>(s.size() / 2 + 1, 0.0), std::vector<unsigned char>(s.size() / 2 + 1, 1)};
  }

 private:
  double omega_;
};

Outcome rotation() {
  const double omega = 3.0, nu = 0.5, dt = nu / omega;
  auto p = std::make_shared<Rotation>(omega);
  std::vector<double> u0(10);
  for (std::size_t k = 0; k < 10; k += 2) {
    u0[k] = 1.0 + 0.1 * k;
    u0[k + 1] = -0.5 + 0.2 * k;
  }
  const auto traj = integrate(Scheme::ef(), p, u0, 0.0, 1000 * dt, dt, omega);
  // Exact flow: rotation by 1000 nu, reduced mod 2 pi in long double.
  const long double angle = std::fmod(1000.0L * 0.5L, 2.0L * 3.14159265358979323846264338327950288L);
  const double c = static_cast<double>(std::cos(angle)), s = static_cast<double>(std::sin(angle));
  double err = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < 10; k += 2) {
    const double eu = c * u0[k] - s * u0[k + 1], ev = s * u0[k] + c * u0[k + 1];
    err += std::pow(traj.states.back()[k] - eu, 2) + std::pow(traj.states.back()[k + 1] - ev, 2);
    norm += eu * eu + ev * ev;
  }
  const double rel = std::sqrt(err / norm);
  return {rel <= 1e-12, "relative error after 1000 steps " + sci(rel)};
}

/// Largest differenced term of the residual, max|G|/dt + max|gamma b F|/dx.
double term_scale(const Trajectory& traj, int law) {
  const auto& p = *traj.problem;
  const double w = std::abs(traj.tableau.gamma[0] * traj.tableau.b[0]);
  double g = 0.0, f = 0.0;
  for (std::size_t n = 0; n < traj.steps(); ++n) {
    for (double v : p.density(law, traj.states[n])) g = std::max(g, std::abs(v));
    const auto& y = traj.stages[n];
    f = std::max(f, p.flux(law, y, p.rhs(traj.time(n), y)).max_abs());
  }
  return g / traj.dt + w * f / p.grid().dx();
}

Outcome symplecticity() {
  bool ef_ok = true, off_ok = true;
  for (double nu : {0.01, 0.1, 1.0, 3.0}) {
    ef_ok = ef_ok && is_symplectic(ef_midpoint(nu), 1e-12).symplectic;
    off_ok = off_ok && !is_symplectic(one_stage_ef_coeffs(nu, 0.3), 1e-12).symplectic;
  }
  const double omega = 5.0;
  const auto exact = advection_exact(AdvectionProfile::sine, omega);
  auto p = std::make_shared<AdvectionProblem>(Grid::with_spacing(-1, 1, 0.01, Topology::dirichlet), omega,
                                              [&](double x, double t) { return exact.evaluate(x, t)[0]; });
  const auto traj = integrate(Scheme::ef_c1(0.3), p, exact.sample(p->grid(), 0.0), 0.0, 0.5, 0.05, omega);
  const double mass = err_local(traj, 1), mass_scaled = mass / term_scale(traj, 1);
  const double momentum = err_local(traj, 2);
  const bool ok = ef_ok && off_ok && mass_scaled <= 1e-10 && momentum >= 1e3 * mass;
  return {ok, std::string("EF symplectic ") + (ef_ok ? "yes" : "no") + ", c1=0.3 rejected " +
                  (off_ok ? "yes" : "no") + ", c1=0.3 mass residual " + sci(mass) + " (scaled " +
                  sci(mass_scaled) + "), momentum residual " + sci(momentum)};
}

Outcome small_nu() {
  auto closure = [](double x, double t) { return std::cos(3 * x - t); };
  const std::vector<std::shared_ptr<SemidiscreteProblem>> problems{
      std::make_shared<AdvectionProblem>(Grid::with_nodes(-1, 1, 64, Topology::dirichlet), 1.0, closure),
      std::make_shared<MkdvProblem>(Grid::with_nodes(-3, 3, 64, Topology::periodic)),
      std::make_shared<NlsProblem>(Grid::with_nodes(-M_PI, M_PI, 64, Topology::periodic))};
  double worst = 0.0;
  for (const auto& p : problems) {
    std::vector<double> u(p->state_size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double x = p->grid().node(k / p->components());
      u[k] = (k % 2 == 0 ? 1.0 : 0.5) / std::cosh(x) + 0.2 * std::sin(x);
    }
    const double dt = 1e-3;
    const auto a = step(ef_midpoint(1e-8), *p, u, 0.0, dt);
    const auto b = step(classic_midpoint(), *p, u, 0.0, dt);
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      diff = std::max(diff, std::abs(a.u_next[k] - b.u_next[k]));
      scale = std::max(scale, std::abs(b.u_next[k]));
    }
    worst = std::max(worst, diff / scale);
  }
  return {worst <= 1e-12, "max relative gap " + sci(worst)};
}

Outcome drift() {
  DemoConfig cfg;  // xi 0.7, [-4, 4], dx 0.04, dt 0.004, T 20
  cfg.scheme = "ef";
  const double ef = breather_demo(cfg).drift.mean_over(10.0, 20.0);
  cfg.scheme = "classic";
  const double classic = breather_demo(cfg).drift.mean_over(10.0, 20.0);
  const double bound = 0.2;
  const bool ok = std::abs(ef) <= bound && classic < 0.0 && std::abs(classic) >= 2.0 * bound;
  return {ok, "mean peak x on [10, 20]: EF " + sci(ef) + ", classic " + sci(classic)};
}

/// Gaussian elimination with partial pivoting on a dense row-major copy.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= l * a[k * n + j];
      b[i] -= l * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

Outcome oracles() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double solve_gap = 0.0;
  for (bool periodic : {false, true})
    for (std::size_t n : {5u, 9u, 17u, 33u, 50u})
      for (std::size_t kl = 1; kl <= 3; ++kl) {
        const std::size_t ku = 4 - kl;
        BandedMatrix m(n, kl, ku, periodic);
        for (std::size_t i = 0; i < n; ++i)
          for (std::ptrdiff_t d = -static_cast<std::ptrdiff_t>(kl); d <= static_cast<std::ptrdiff_t>(ku); ++d)
            if (auto j = m.column(i, d)) m.at(i, *j) = (d == 0 ? 6.0 : 0.0) + u(rng);
        std::vector<double> rhs(n);
        for (double& r : rhs) r = u(rng);
        const auto x = banded_lu_solve(m, rhs);
        const auto ref = dense_solve(m.to_dense(), rhs);
        double diff = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          diff = std::max(diff, std::abs(x[i] - ref[i]));
          norm = std::max(norm, std::abs(ref[i]));
        }
        solve_gap = std::max(solve_gap, diff / norm);
      }

  auto closure = [](double x, double t) { return std::sin(x - t); };
  const std::vector<std::shared_ptr<SemidiscreteProblem>> problems{
      std::make_shared<AdvectionProblem>(Grid::with_nodes(-1, 1, 32, Topology::dirichlet), 2.0, closure),
      std::make_shared<MkdvProblem>(Grid::with_nodes(-4, 4, 32, Topology::periodic)),
      std::make_shared<MkdvProblem>(Grid::with_nodes(-4, 4, 32, Topology::zero_ghost)),
      std::make_shared<NlsProblem>(Grid::with_nodes(-2, 2, 32, Topology::periodic))};
  double jac_gap = 0.0;
  for (const auto& p : problems) {
    std::vector<double> s(p->state_size());
    for (double& v : s) v = u(rng);
    const BandedMatrix jac = p->jacobian(0.3, s);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double h = 1e-5;
      auto sp = s, sm = s;
      sp[j] += h;
      sm[j] -= h;
      const auto fp = p->rhs(0.3, sp), fm = p->rhs(0.3, sm);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double fd = (fp[i] - fm[i]) / (2 * h);
        // Entries below 1 in magnitude are compared absolutely.
        jac_gap = std::max(jac_gap, std::abs(fd - jac(i, j)) / std::max(1.0, std::abs(jac(i, j))));
      }
    }
  }
  return {solve_gap <= 1e-12 && jac_gap <= 1e-6,
          "banded vs dense relative gap " + sci(solve_gap) + ", Jacobian vs FD " + sci(jac_gap)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Table 1 advection sine", table1},
      {"2 Table 2 advection log-sine", table2},
      {"3 Table 3 mKdV breather", table3},
      {"4 Table 4 NLS breather", table4},
      {"5 rotation exactness", rotation},
      {"6 symplecticity dichotomy", symplecticity},
      {"7 nu -> 0 consistency", small_nu},
      {"8 breather drift", drift},
      {"9 solver and Jacobian oracles", oracles},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s [%s] %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
