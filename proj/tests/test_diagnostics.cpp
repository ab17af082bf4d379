#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "efit/diagnostics.hpp"
#include "efit/experiment.hpp"

using namespace efit;

namespace {

Trajectory run(const RunConfig& cfg, const std::string& scheme, int n) {
  const ProblemSetup setup = make_setup(cfg);
  return integrate(Scheme::parse(scheme), setup.problem, setup.initial_state, cfg.t0, cfg.t_final,
                   cfg.dt_for(n), cfg.fitted_omega(), cfg.solver);
}

double solution_error_of(const RunConfig& cfg, const std::string& scheme, int n) {
  return solution_error(run(cfg, scheme, n), make_setup(cfg).exact);
}

/// Hand-built trajectory holding the given states.
Trajectory constant_trajectory(std::shared_ptr<const SemidiscreteProblem> p, std::vector<double> u,
                               std::size_t steps, const Tableau& t) {
  Trajectory traj;
  traj.problem = std::move(p);
  traj.tableau = t;
  traj.dt = 0.01;
  traj.states.assign(steps + 1, u);
  return traj;
}

std::shared_ptr<MkdvProblem> small_mkdv(Topology topo = Topology::periodic) {
  return std::make_shared<MkdvProblem>(Grid::with_nodes(-4, 4, 80, topo));
}

std::vector<double> bump(const Grid& g, std::size_t comps) {
  std::vector<double> u(g.size() * comps);
  for (std::size_t m = 0; m < g.size(); ++m)
    for (std::size_t c = 0; c < comps; ++c)
      u[m * comps + c] = (c + 1.0) / std::cosh(g.node(m)) + 0.1 * c;
  return u;
}

/// Largest magnitude among the differenced terms of the residual, max|G|/dt
/// plus max|gamma b F|/dx over the run: the roundoff yardstick for residuals.
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

}  // namespace

// ---- estimate_order --------------------------------------------------------

TEST(EstimateOrder, IdealHalvingIsTwo) {
  EXPECT_DOUBLE_EQ(estimate_order(4e-3, 1e-3, 0.2, 0.1), 2.0);
  for (double c : {0.5, 3.0, 1e4})
    for (double h : {0.1, 1e-3}) EXPECT_NEAR(estimate_order(c * h * h, c * h * h / 4, h, h / 2), 2.0, 1e-12);
}

TEST(EstimateOrder, ReferenceTableRows) {
  EXPECT_NEAR(estimate_order(4.45e-2, 1.10e-2, 0.1, 0.05), 2.01, 0.01);
}

TEST(EstimateOrder, SaturatedErrorsGiveZero) {
  EXPECT_EQ(estimate_order(1e-7, 1e-7, 0.2, 0.1), 0.0);
}

TEST(EstimateOrder, RejectsDegenerateInputs) {
  EXPECT_THROW(estimate_order(0.0, 1.0, 0.2, 0.1), std::domain_error);
  EXPECT_THROW(estimate_order(1.0, -1.0, 0.2, 0.1), std::domain_error);
  EXPECT_THROW(estimate_order(1.0, 1.0, 0.0, 0.1), std::domain_error);
  EXPECT_THROW(estimate_order(1.0, 2.0, 0.1, 0.1), std::domain_error);
  EXPECT_THROW(estimate_order(std::nan(""), 2.0, 0.2, 0.1), std::domain_error);
}

// ---- solution_error --------------------------------------------------------

TEST(SolutionError, ExactFinalStateGivesZero) {
  const auto ex = advection_exact(AdvectionProfile::sine, 5.0);
  auto p = std::make_shared<AdvectionProblem>(Grid::with_nodes(-1, 1, 41, Topology::dirichlet), 5.0,
                                              [&](double x, double t) { return ex.evaluate(x, t)[0]; });
  Trajectory traj = constant_trajectory(p, ex.sample(p->grid(), 0.0), 0, classic_midpoint());
  EXPECT_EQ(solution_error(traj, ex), 0.0);
}

TEST(SolutionError, IsRelativeEuclidean) {
  const NlsBreather br(1.4, 25.0);
  const auto ex = nls_exact(br);
  auto p = std::make_shared<NlsProblem>(Grid::with_nodes(-M_PI / 7, M_PI / 7, 64, Topology::periodic));
  auto u = ex.sample(p->grid(), 0.0);
  double norm2 = 0.0;
  for (double v : u) norm2 += v * v;
  // Perturb only the v component by a known amount.
  const double delta = 1e-3;
  for (std::size_t k = 1; k < u.size(); k += 2) u[k] += delta;
  Trajectory traj = constant_trajectory(p, u, 0, classic_midpoint());
  const double expected = std::sqrt(64 * delta * delta / norm2);
  EXPECT_NEAR(solution_error(traj, ex), expected, 1e-14);
}

TEST(SolutionError, ZeroExactNormThrows) {
  ExactSolution zero{1, [](double, double) { return std::array<double, 2>{0.0, 0.0}; }};
  auto p = small_mkdv();
  Trajectory traj = constant_trajectory(p, std::vector<double>(80, 1.0), 0, classic_midpoint());
  EXPECT_THROW(solution_error(traj, zero), std::domain_error);
}

TEST(SolutionError, ReferenceTableOneEfValue) {
  const double err = solution_error_of(table_config(1), "ef", 2);
  EXPECT_NEAR(err, 3.50e-7, 0.02 * 3.50e-7);
}

TEST(SolutionError, ReferenceTableFourClassicValue) {
  const double err = solution_error_of(table_config(4), "classic", 3);
  EXPECT_NEAR(err, 1.52e-2, 0.05 * 1.52e-2);
}

// ---- residual_field --------------------------------------------------------

TEST(ResidualField, ConstantTrajectoryIsExactlyZero) {
  // Periodic grid: a constant state has constant density and constant flux.
  auto p = small_mkdv();
  Trajectory traj = constant_trajectory(p, std::vector<double>(80, 0.7), 3, classic_midpoint());
  for (int law : {1, 2})
    for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(residual_field(traj, law, n).max_abs(), 0.0);
}

TEST(ResidualField, RejectsBadArguments) {
  auto p = small_mkdv();
  Trajectory traj = constant_trajectory(p, std::vector<double>(80, 0.7), 2, classic_midpoint());
  EXPECT_THROW(residual_field(traj, 0, 0), std::invalid_argument);
  EXPECT_THROW(residual_field(traj, 3, 0), std::invalid_argument);
  EXPECT_THROW(residual_field(traj, 1, 2), std::out_of_range);
  traj.tableau = gauss_legendre_2();
  EXPECT_THROW(residual_field(traj, 1, 0), std::invalid_argument);
  traj.tableau = one_stage_ef_coeffs(0.5, 0.3);  // not reconstructible from states
  EXPECT_THROW(residual_field(traj, 1, 0), std::invalid_argument);
}

TEST(ResidualField, DirichletEdgesAreMasked) {
  const auto ex = advection_exact(AdvectionProfile::sine, 5.0);
  auto p = std::make_shared<AdvectionProblem>(Grid::with_nodes(-1, 1, 41, Topology::dirichlet), 5.0,
                                              [&](double x, double t) { return ex.evaluate(x, t)[0]; });
  const auto traj = integrate(Scheme::ef(), p, ex.sample(p->grid(), 0.0), 0.0, 0.1, 0.05, 5.0);
  const auto r = residual_field(traj, 1, 0);
  EXPECT_FALSE(r.valid.front());
  EXPECT_FALSE(r.valid.back());
  EXPECT_TRUE(r.valid[20]);
}

TEST(ResidualField, ReconstructedStageMatchesRetainedStage) {
  auto p = small_mkdv();
  const auto traj = integrate(Scheme::ef(), p, bump(p->grid(), 1), 0.0, 0.02, 0.01, 5.0);
  Trajectory stripped = traj;
  stripped.stages.clear();
  for (int law : {1, 2}) {
    const auto a = residual_field(traj, law, 1), b = residual_field(stripped, law, 1);
    for (std::size_t m = 0; m < a.values.size(); ++m) EXPECT_NEAR(a.values[m], b.values[m], 1e-9);
  }
}

TEST(ResidualField, MassLawHoldsForEveryOneStageTableau) {
  const auto ex = advection_exact(AdvectionProfile::sine, 5.0);
  auto p = std::make_shared<AdvectionProblem>(Grid::with_spacing(-1, 1, 0.01, Topology::dirichlet), 5.0,
                                              [&](double x, double t) { return ex.evaluate(x, t)[0]; });
  const double dt = 0.05;
  for (const std::string s : {"classic", "ef", "ef_c1:0.3", "ef_c1:0.8"}) {
    const auto traj = integrate(Scheme::parse(s), p, ex.sample(p->grid(), 0.0), 0.0, 0.5, dt, 5.0);
    // Terms of size |u|/dt and |u|/dx are differenced.
    EXPECT_LE(err_local(traj, 1), 1e-10 * term_scale(traj, 1)) << s;
  }
}

TEST(ResidualField, QuadraticLawSeparatesSymplecticTableaus) {
  auto p = small_mkdv();
  const auto u0 = bump(p->grid(), 1);
  const double dt = 0.01, omega = 20.0;
  const auto sym = integrate(Scheme::ef(), p, u0, 0.0, 0.1, dt, omega);
  const auto off = integrate(Scheme::parse("ef_c1:0.3"), p, u0, 0.0, 0.1, dt, omega);
  EXPECT_LE(err_local(sym, 2), 1e-10 * term_scale(sym, 2));
  EXPECT_LE(err_local(off, 1), 1e-10 * term_scale(off, 1));
  EXPECT_GT(err_local(off, 2), 1e3 * err_local(off, 1));
}

TEST(ResidualField, NlsChargeAndMomentumUnderEf) {
  // Both NLS laws have quadratic densities, so both need symplecticity.
  const NlsBreather br(1.4, 25.0);
  auto p = std::make_shared<NlsProblem>(Grid::with_nodes(-M_PI / 7, M_PI / 7, 200, Topology::periodic));
  const auto u0 = nls_exact(br).sample(p->grid(), 0.0);
  const auto sym = integrate(Scheme::ef(), p, u0, 0.0, 0.05, 0.005, 25.0);
  const auto off = integrate(Scheme::parse("ef_c1:0.3"), p, u0, 0.0, 0.05, 0.005, 25.0);
  for (int law : {1, 2}) {
    EXPECT_LE(err_local(sym, law), 1e-10 * term_scale(sym, law)) << law;
    EXPECT_GT(err_local(off, law), 1e3 * err_local(sym, law)) << law;
  }
}

// ---- aggregated metrics ----------------------------------------------------

TEST(ErrInvariant, ConstantTrajectoryIsZero) {
  auto p = small_mkdv();
  Trajectory traj = constant_trajectory(p, bump(p->grid(), 1), 4, classic_midpoint());
  EXPECT_EQ(err_invariant(traj, 1), 0.0);
  EXPECT_EQ(err_invariant(traj, 2), 0.0);
}

TEST(ErrInvariant, MatchesDirectSum) {
  auto p = small_mkdv();
  const auto u0 = bump(p->grid(), 1);
  auto u1 = u0;
  u1[10] += 0.25;
  Trajectory traj = constant_trajectory(p, u0, 2, classic_midpoint());
  traj.states[2] = u1;
  const double dx = p->grid().dx();
  EXPECT_NEAR(err_invariant(traj, 1), dx * 0.25, 1e-15);
  EXPECT_NEAR(err_invariant(traj, 2), dx * 0.5 * std::abs(u1[10] * u1[10] - u0[10] * u0[10]), 1e-14);
}

TEST(ErrInvariant, ScalesWithHomogeneousDensity) {
  // Mass is degree 1, momentum degree 2: scaling every state by k scales the
  // aggregated drift by k and k^2 exactly (k a power of two).
  auto p = small_mkdv();
  const auto traj = integrate(Scheme::parse("ef_c1:0.3"), p, bump(p->grid(), 1), 0.0, 0.05, 0.01, 20.0);
  Trajectory scaled = traj;
  for (auto& s : scaled.states)
    for (double& v : s) v *= 4.0;
  EXPECT_EQ(err_invariant(scaled, 1), 4.0 * err_invariant(traj, 1));
  EXPECT_EQ(err_invariant(scaled, 2), 16.0 * err_invariant(traj, 2));
  EXPECT_GT(err_invariant(traj, 2), 0.0);
}

TEST(ErrInvariant, RejectsDirichlet) {
  const auto ex = advection_exact(AdvectionProfile::sine, 5.0);
  auto p = std::make_shared<AdvectionProblem>(Grid::with_nodes(-1, 1, 41, Topology::dirichlet), 5.0,
                                              [&](double x, double t) { return ex.evaluate(x, t)[0]; });
  Trajectory traj = constant_trajectory(p, ex.sample(p->grid(), 0.0), 1, classic_midpoint());
  EXPECT_THROW(err_invariant(traj, 1), std::invalid_argument);
  EXPECT_NO_THROW(conservation_error(traj, 1));
}

TEST(ErrLocal, ZeroTrajectoryIsZero) {
  auto p = small_mkdv(Topology::zero_ghost);
  Trajectory traj = constant_trajectory(p, std::vector<double>(80, 0.0), 3, ef_midpoint(0.4));
  EXPECT_EQ(err_local(traj, 1), 0.0);
  EXPECT_EQ(err_local(traj, 2), 0.0);
}

TEST(ConservationError, ReferenceTableOneClassic) {
  const auto traj = run(table_config(1), "classic", 0);
  EXPECT_LE(conservation_error(traj, 1), 1e-10);
  EXPECT_LE(conservation_error(traj, 2), 1e-10);
}

TEST(ConservationError, ReferenceTableTwoEf) {
  const auto traj = run(table_config(2), "ef", 0);
  EXPECT_LE(conservation_error(traj, 1), 1e-8);
  EXPECT_LE(conservation_error(traj, 2), 1e-8);
}

TEST(ConservationError, ReferenceTableThreeEf) {
  const auto traj = run(table_config(3), "ef", 0);
  EXPECT_LE(conservation_error(traj, 1), 1e-10);
}

TEST(ConservationError, ReferenceTableFourEf) {
  const auto traj = run(table_config(4), "ef", 0);
  EXPECT_LE(conservation_error(traj, 1), 1e-11);
}
