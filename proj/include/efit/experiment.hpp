#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "efit/diagnostics.hpp"
#include "efit/efrk.hpp"
#include "efit/problems.hpp"

namespace efit {

/// One convergence study: a problem, its initial data, and a dt ladder
/// dt_n ~ base_dt / 2^n for n = n_min..n_max.
struct RunConfig {
  ProblemId problem = ProblemId::advection;
  std::vector<std::string> schemes{"classic", "ef"};
  /// Advection speed and fitted frequency. For mkdv, 0 selects 64 xi^3.
  double omega = 0.0;
  double dx = 0.0;
  double t0 = 0.0;
  double t_final = 1.0;
  double a = -1.0;
  double b = 1.0;
  double base_dt = 0.1;
  int n_min = 0;
  int n_max = 5;
  /// "sine" or "log_sine" (advection), "breather" (mkdv, nls).
  std::string initial_condition = "sine";
  double xi = 1.0;
  double beta = 1.4;
  /// mkdv only: "periodic" or "zero_ghost". Empty selects the problem default
  /// (periodic for mkdv and nls, Dirichlet for advection).
  std::string boundary;
  std::string output;
  SolverOptions solver;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  double fitted_omega() const;
  /// Ladder entry n: the span divided into ceil(span / (base_dt / 2^n)) steps.
  double dt_for(int n) const;
};

struct ReportRow {
  int n = 0;
  double dt = 0.0;
  std::string scheme;
  double sol_err = 0.0;
  std::optional<double> order;
  double err1 = 0.0;
  double err2 = 0.0;
  bool failed = false;
  std::string failure;
  std::size_t max_newton_iterations = 0;
};

/// Rows ordered by n, then by the scheme order of the config.
struct ExperimentReport {
  std::vector<ReportRow> rows;

  std::vector<const ReportRow*> column(const std::string& scheme) const;
};

/// Problem, exact solution and initial state described by a config.
struct ProblemSetup {
  std::shared_ptr<const SemidiscreteProblem> problem;
  ExactSolution exact;
  std::vector<double> initial_state;
};

ProblemSetup make_setup(const RunConfig& config);

/// Grid topology selected by `boundary` for `problem`; throws on a mismatch.
Topology resolve_topology(ProblemId problem, const std::string& boundary);

/// Runs every (scheme, n) entry, concurrently up to EFIT_THREADS workers.
/// A failing entry is reported as a failed row; the ladder continues.
ExperimentReport run_experiment(const RunConfig& config);

/// Order columns are left empty for the first row of each scheme and where
/// either error lies within 3x of the saturation floor (minimum error of a
/// ladder whose last refinement gained less than first order).
void assign_orders(ExperimentReport& report, const std::vector<std::string>& schemes);

/// Settings of the four reference tables; max_n < 0 picks the default cap.
RunConfig table_config(int id, int max_n = -1);

/// n,dt,scheme,sol_err,order,err1,err2. Errors and dt carry 10 significant
/// digits; the order column carries 17 so it can be recomputed from the rest.
void write_report_csv(const ExperimentReport& report, std::ostream& out);

RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& config);

struct DemoConfig {
  ProblemId problem = ProblemId::mkdv;
  std::string scheme = "ef";
  double xi = 0.7;
  double beta = 1.4;
  double omega = 25.0;  // nls only; mkdv uses 64 xi^3
  std::string boundary;  // as in RunConfig
  double a = -4.0;
  double b = 4.0;
  double dx = 0.04;
  double dt = 0.004;
  double t0 = 0.0;
  double t_final = 20.0;
};

/// Location of the largest |u| (|psi| for nls) per time level.
struct DriftSummary {
  std::vector<double> times;
  std::vector<double> peak_x;
  std::vector<double> running_mean;

  /// Mean peak location over time levels with from <= t <= to.
  double mean_over(double from, double to) const;
};

struct DemoResult {
  Trajectory trajectory;
  DriftSummary drift;
};

DemoResult breather_demo(const DemoConfig& config);
DriftSummary drift_summary(const Trajectory& traj);

/// Space-time dump: t,x,u[,v], one row per node per stored time level.
void write_field_csv(const Trajectory& traj, std::ostream& out, std::size_t stride = 1);
/// t,peak_x,running_mean
void write_drift_csv(const DriftSummary& drift, std::ostream& out);

}  // namespace efit
