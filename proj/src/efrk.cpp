#include "efit/efrk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace efit {

void Tableau::validate() const {
  const std::size_t s = stages;
  if (s == 0) throw std::invalid_argument("Tableau: no stages");
  if (gamma.size() != s || b.size() != s || c.size() != s || a.size() != s * s)
    throw std::invalid_argument("Tableau: coefficient sizes inconsistent with s");
  for (double g : gamma)
    if (!(g > 0.0)) throw std::invalid_argument("Tableau: gamma_i must be positive");
  for (const auto* v : {&gamma, &a, &b, &c})
    for (double x : *v)
      if (!std::isfinite(x)) throw std::invalid_argument("Tableau: non-finite coefficient");
}

bool Tableau::is_midpoint_form() const {
  if (stages != 1 || c[0] != 0.5) return false;
  return std::abs(a[0] - 0.5 * gamma[0] * b[0]) <= 1e-15 * std::abs(a[0]);
}

namespace {

constexpr double series_threshold = 1e-6;
constexpr double singular_margin = 1e-8;

std::string format_label(std::string_view stem, double nu, double c1) {
  std::ostringstream os;
  os << stem << "(nu=" << nu << ", c1=" << c1 << ")";
  return os.str();
}

}  // namespace

Tableau one_stage_ef_coeffs(double nu, double c1) {
  const double z = c1 * nu;
  if (!std::isfinite(nu) || !std::isfinite(c1))
    throw SingularParameterError("one_stage_ef_coeffs: non-finite parameter");
  if (std::abs(z) >= std::numbers::pi / 2 - singular_margin)
    throw SingularParameterError("one_stage_ef_coeffs: |c1 nu| too close to pi/2");
  if (std::abs(nu) >= std::numbers::pi - singular_margin)
    throw SingularParameterError("one_stage_ef_coeffs: |nu| too close to pi");

  Tableau t;
  t.stages = 1;
  t.c = {c1};
  t.nu = nu;
  if (std::abs(nu) < series_threshold) {
    const double z2 = z * z, nu2 = nu * nu;
    t.gamma = {1.0 + z2 / 2.0 + 5.0 * z2 * z2 / 24.0};
    t.a = {c1 * (1.0 + z2 / 3.0 + 2.0 * z2 * z2 / 15.0)};
    t.b = {1.0 + (z2 / 2.0 - nu2 / 6.0) +
           (5.0 * z2 * z2 / 24.0 - nu2 * z2 / 12.0 + nu2 * nu2 / 120.0)};
  } else {
    const double cz = std::cos(z);
    t.gamma = {1.0 / cz};
    t.a = {std::tan(z) / nu};
    t.b = {std::sin(nu) / (nu * cz)};
  }
  t.label = format_label(c1 == 0.5 ? "ef_midpoint" : "ef_one_stage", nu, c1);
  return t;
}

Tableau ef_midpoint(double nu) { return one_stage_ef_coeffs(nu, 0.5); }

Tableau classic_midpoint() {
  return Tableau{1, {1.0}, {0.5}, {1.0}, {0.5}, 0.0, "classic_midpoint"};
}

Tableau gauss_legendre_2() {
  const double r = std::sqrt(3.0) / 6.0;
  return Tableau{2,
                 {1.0, 1.0},
                 {0.25, 0.25 - r, 0.25 + r, 0.25},
                 {0.5, 0.5},
                 {0.5 - r, 0.5 + r},
                 0.0,
                 "gauss_legendre_2"};
}

SymplecticityReport is_symplectic(const Tableau& t, double tol) {
  t.validate();
  double worst = 0.0;
  for (std::size_t i = 0; i < t.stages; ++i)
    for (std::size_t j = 0; j < t.stages; ++j) {
      const double defect = t.b[i] * t.a_at(i, j) / t.gamma[i] +
                            t.b[j] * t.a_at(j, i) / t.gamma[j] - t.b[i] * t.b[j];
      worst = std::max(worst, std::abs(defect));
    }
  return {worst <= tol, worst};
}

const BandedLU* StepCache::find(double key_dt, const Tableau& tableau) const {
  if (!lu_ || key_dt != dt_) return nullptr;
  std::vector<double> sig = tableau.gamma;
  sig.insert(sig.end(), tableau.a.begin(), tableau.a.end());
  sig.insert(sig.end(), tableau.b.begin(), tableau.b.end());
  return sig == signature_ ? &*lu_ : nullptr;
}

void StepCache::store(double key_dt, const Tableau& tableau, BandedLU lu) {
  dt_ = key_dt;
  signature_ = tableau.gamma;
  signature_.insert(signature_.end(), tableau.a.begin(), tableau.a.end());
  signature_.insert(signature_.end(), tableau.b.begin(), tableau.b.end());
  lu_.emplace(std::move(lu));
}

namespace {

constexpr double roundoff_safety = 16.0;

// Size of the roundoff in a residual x - u0 - dt*sum(...) evaluated near x:
// eps times the magnitudes being summed, with |J| |Y| bounding the terms of f.
double residual_roundoff(const BandedMatrix& jac, std::span<const double> y, double coeff,
                         std::span<const double> u) {
  double terms = 0.0;
  for (std::size_t i = 0; i < jac.size(); ++i) {
    double row = 0.0;
    for (std::ptrdiff_t d = -static_cast<std::ptrdiff_t>(jac.kl());
         d <= static_cast<std::ptrdiff_t>(jac.ku()); ++d)
      if (const auto j = jac.column(i, d)) row += std::abs(jac(i, *j) * y[*j]);
    terms = std::max(terms, row);
  }
  double u_max = 0.0;
  for (double v : u) u_max = std::max(u_max, std::abs(v));
  return roundoff_safety * std::numeric_limits<double>::epsilon() *
         (2.0 * u_max + std::abs(coeff) * terms);
}

StepResult step_midpoint_form(const Tableau& tab, const SemidiscreteProblem& problem,
                              std::span<const double> u_n, double t_n, double dt,
                              const SolverOptions& opts, StepCache* cache) {
  const std::size_t n = u_n.size();
  const double half_gamma = 0.5 * tab.gamma[0];
  const double coeff = dt * tab.b[0];
  const double t_stage = t_n + 0.5 * dt;
  const auto bidx = problem.boundary_indices();
  const auto g_next = problem.boundary_values(t_n + dt);

  std::vector<double> stage(n), f(n);
  auto make_stage = [&](std::span<const double> x) {
    for (std::size_t i = 0; i < n; ++i) stage[i] = half_gamma * (x[i] + u_n[i]);
  };
  ResidualFn residual = [&](std::span<const double> x, std::span<double> r) {
    make_stage(x);
    problem.rhs(t_stage, stage, f);
    for (std::size_t i = 0; i < n; ++i) r[i] = x[i] - u_n[i] - coeff * f[i];
    for (std::size_t k = 0; k < bidx.size(); ++k) r[bidx[k]] = x[bidx[k]] - g_next[k];
  };
  JacobianFn jacobian = [&](std::span<const double> x) {
    make_stage(x);
    BandedMatrix jac = problem.jacobian(t_stage, stage);
    jac.scale_and_shift(-coeff * half_gamma, 1.0);
    return jac;
  };

  std::vector<double> guess(u_n.begin(), u_n.end());
  for (std::size_t k = 0; k < bidx.size(); ++k) guess[bidx[k]] = g_next[k];

  SolverOptions local = opts;
  local.bandwidth = std::max(opts.bandwidth, problem.half_bandwidth());
  local.periodic = problem.grid().periodic();
  make_stage(guess);
  local.roundoff_floor = std::max(opts.roundoff_floor, residual_roundoff(problem.jacobian(t_stage, stage), stage,
                                                           coeff, u_n));

  const BandedLU* frozen = nullptr;
  if (problem.is_linear() && cache != nullptr &&
      opts.jacobian_mode == JacobianMode::analytic_banded) {
    frozen = cache->find(dt, tab);
    if (frozen == nullptr) {
      cache->store(dt, tab, BandedLU(jacobian(guess)));
      frozen = cache->find(dt, tab);
    }
  }

  NewtonResult solved = newton_solve(residual, jacobian, std::move(guess), local, frozen);

  StepResult out;
  out.newton_iterations = solved.iterations;
  out.residual_norm = solved.residual_norm;
  make_stage(solved.x);
  out.stages.Y.push_back(stage);
  out.stages.f_at_stages.push_back(problem.rhs(t_stage, stage));
  out.u_next = std::move(solved.x);
  return out;
}

StepResult step_stages(const Tableau& tab, const SemidiscreteProblem& problem,
                       std::span<const double> u_n, double t_n, double dt,
                       const SolverOptions& opts) {
  const std::size_t n = u_n.size();
  const std::size_t s = tab.stages;
  const auto bidx = problem.boundary_indices();
  const auto g_next = problem.boundary_values(t_n + dt);

  // Boundary stage values: the one-stage relation Y = gamma u0 + (a/b)(u1 - u0)
  // applied to the prescribed values, or the closure at the stage time.
  std::vector<std::vector<double>> y_boundary(s, std::vector<double>(bidx.size()));
  for (std::size_t i = 0; i < s; ++i) {
    if (s == 1 && tab.b[0] != 0.0) {
      const double ratio = tab.a[0] / tab.b[0];
      for (std::size_t k = 0; k < bidx.size(); ++k) {
        const double g0 = u_n[bidx[k]];
        y_boundary[i][k] = tab.gamma[0] * g0 + ratio * (g_next[k] - g0);
      }
    } else {
      y_boundary[i] = problem.boundary_values(t_n + tab.c[i] * dt);
    }
  }

  std::vector<std::vector<double>> y(s, std::vector<double>(n)), f(s, std::vector<double>(n));
  auto unpack = [&](std::span<const double> z) {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < s; ++i) y[i][k] = z[k * s + i];
  };
  ResidualFn residual = [&](std::span<const double> z, std::span<double> r) {
    unpack(z);
    for (std::size_t j = 0; j < s; ++j) problem.rhs(t_n + tab.c[j] * dt, y[j], f[j]);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < s; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s; ++j) acc += tab.a_at(i, j) * f[j][k];
        r[k * s + i] = z[k * s + i] - tab.gamma[i] * u_n[k] - dt * acc;
      }
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t k = 0; k < bidx.size(); ++k)
        r[bidx[k] * s + i] = z[bidx[k] * s + i] - y_boundary[i][k];
  };

  const std::size_t w = problem.half_bandwidth();
  const std::size_t wide = s * w + s - 1;
  const bool periodic = problem.grid().periodic();
  JacobianFn jacobian = [&](std::span<const double> z) {
    unpack(z);
    BandedMatrix big(n * s, wide, wide, periodic);
    for (std::size_t j = 0; j < s; ++j) {
      const BandedMatrix jf = problem.jacobian(t_n + tab.c[j] * dt, y[j]);
      for (std::size_t k = 0; k < n; ++k)
        for (std::ptrdiff_t d = -static_cast<std::ptrdiff_t>(w);
             d <= static_cast<std::ptrdiff_t>(w); ++d) {
          const auto l = jf.column(k, d);
          if (!l) continue;
          const double v = jf(k, *l);
          if (v == 0.0) continue;
          for (std::size_t i = 0; i < s; ++i)
            big.at(k * s + i, *l * s + j) -= dt * tab.a_at(i, j) * v;
        }
    }
    for (std::size_t q = 0; q < n * s; ++q) big.at(q, q) += 1.0;
    return big;
  };

  std::vector<double> guess(n * s);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < s; ++i) guess[k * s + i] = tab.gamma[i] * u_n[k];
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t k = 0; k < bidx.size(); ++k) guess[bidx[k] * s + i] = y_boundary[i][k];

  SolverOptions local = opts;
  local.bandwidth = std::max(opts.bandwidth, wide);
  local.periodic = periodic;
  double a_max = 0.0;
  for (double v : tab.a) a_max = std::max(a_max, std::abs(v));
  unpack(guess);
  for (std::size_t j = 0; j < s; ++j)
    local.roundoff_floor = std::max(local.roundoff_floor,
                                    residual_roundoff(problem.jacobian(t_n + tab.c[j] * dt, y[j]), y[j],
                                               dt * a_max * static_cast<double>(s), u_n));
  NewtonResult solved = newton_solve(residual, jacobian, std::move(guess), local);

  StepResult out;
  out.newton_iterations = solved.iterations;
  out.residual_norm = solved.residual_norm;
  unpack(solved.x);
  out.u_next.assign(u_n.begin(), u_n.end());
  for (std::size_t i = 0; i < s; ++i) {
    problem.rhs(t_n + tab.c[i] * dt, y[i], f[i]);
    for (std::size_t k = 0; k < n; ++k) out.u_next[k] += dt * tab.b[i] * f[i][k];
  }
  for (std::size_t k = 0; k < bidx.size(); ++k) out.u_next[bidx[k]] = g_next[k];
  out.stages.Y = y;
  out.stages.f_at_stages = f;
  return out;
}

}  // namespace

StepResult step(const Tableau& tableau, const SemidiscreteProblem& problem,
                std::span<const double> u_n, double t_n, double dt, const SolverOptions& opts,
                StepCache* cache) {
  tableau.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (u_n.size() != problem.state_size())
    throw std::invalid_argument("step: state does not match the problem");
  if (tableau.is_midpoint_form())
    return step_midpoint_form(tableau, problem, u_n, t_n, dt, opts, cache);
  return step_stages(tableau, problem, u_n, t_n, dt, opts);
}

Scheme Scheme::classic() { return Scheme{}; }

Scheme Scheme::ef() {
  Scheme s;
  s.kind_ = Kind::ef;
  return s;
}

Scheme Scheme::ef_c1(double c1) {
  Scheme s;
  s.kind_ = Kind::ef_c1;
  s.c1_ = c1;
  return s;
}

Scheme Scheme::fixed(Tableau tableau) {
  tableau.validate();
  Scheme s;
  s.kind_ = Kind::fixed;
  s.fixed_ = std::move(tableau);
  return s;
}

Scheme Scheme::parse(std::string_view text) {
  if (text == "classic") return classic();
  if (text == "ef") return ef();
  constexpr std::string_view prefix = "ef_c1:";
  if (text.starts_with(prefix)) {
    const std::string value(text.substr(prefix.size()));
    std::size_t used = 0;
    double c1 = 0.0;
    try {
      c1 = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(c1))
      throw std::invalid_argument("invalid c1 value in scheme '" + std::string(text) + "'");
    return ef_c1(c1);
  }
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

std::string Scheme::label() const {
  switch (kind_) {
    case Kind::classic:
      return "classic";
    case Kind::ef:
      return "ef";
    case Kind::ef_c1: {
      std::ostringstream os;
      os << "ef_c1:" << c1_;
      return os.str();
    }
    case Kind::fixed:
      return fixed_->label;
  }
  return "unknown";
}

Tableau Scheme::at(double nu) const {
  switch (kind_) {
    case Kind::classic:
      return classic_midpoint();
    case Kind::ef:
      return ef_midpoint(nu);
    case Kind::ef_c1:
      return one_stage_ef_coeffs(nu, c1_);
    case Kind::fixed:
      return *fixed_;
  }
  return classic_midpoint();
}

std::size_t step_count(double t0, double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_count: dt must be positive");
  const double span = T - t0;
  if (span < 0.0) throw std::invalid_argument("step_count: T precedes t0");
  const double ratio = span / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded))
    throw std::invalid_argument("step_count: dt does not divide T - t0");
  return static_cast<std::size_t>(rounded);
}

Trajectory integrate(const Scheme& scheme, std::shared_ptr<const SemidiscreteProblem> problem,
                     std::vector<double> u0, double t0, double T, double dt, double omega,
                     const SolverOptions& opts) {
  if (!problem) throw std::invalid_argument("integrate: missing problem");
  if (u0.size() != problem->state_size())
    throw std::invalid_argument("integrate: initial state does not match the problem");
  const std::size_t steps = step_count(t0, T, dt);

  Trajectory traj;
  traj.problem = problem;
  traj.tableau = scheme.at(scheme.fitted() ? omega * dt : 0.0);
  traj.tableau.validate();
  traj.scheme = scheme.label();
  traj.t0 = t0;
  traj.dt = dt;
  traj.states.reserve(steps + 1);

  const auto bidx = problem->boundary_indices();
  auto apply_closure = [&](std::vector<double>& u, double t) {
    const auto g = problem->boundary_values(t);
    for (std::size_t k = 0; k < bidx.size(); ++k) u[bidx[k]] = g[k];
  };

  apply_closure(u0, t0);
  traj.states.push_back(std::move(u0));
  StepCache cache;
  for (std::size_t n = 0; n < steps; ++n) {
    std::vector<double> current = traj.states.back();
    const double t_n = traj.time(n);
    apply_closure(current, t_n);
    StepResult res = step(traj.tableau, *problem, current, t_n, dt, opts, &cache);
    apply_closure(res.u_next, traj.time(n + 1));
    if (traj.tableau.stages == 1) traj.stages.push_back(std::move(res.stages.Y.front()));
    traj.newton_iterations.push_back(res.newton_iterations);
    traj.states.push_back(std::move(res.u_next));
  }
  return traj;
}

}  // namespace efit
