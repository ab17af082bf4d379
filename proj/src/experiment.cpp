#include "efit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace efit {

namespace {

constexpr double fitted_limit = std::numbers::pi - 1e-8;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

// Orders are printed at full precision and computed from the values as
// printed, so a reader recomputing them from the CSV gets the same number.
std::string format_order(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

double as_printed(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

std::size_t worker_count(std::size_t tasks) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EFIT_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed > 0) workers = static_cast<std::size_t>(parsed);
  }
  return std::min(workers, std::max<std::size_t>(tasks, 1));
}

}  // namespace

double RunConfig::fitted_omega() const {
  if (problem == ProblemId::mkdv && omega == 0.0) return MkdvBreather(xi).omega();
  return omega;
}

double RunConfig::dt_for(int n) const {
  const double target = base_dt / std::ldexp(1.0, n);
  const double span = t_final - t0;
  if (span == 0.0) return target;
  const double steps = std::ceil(span / target - 1e-9);
  return span / steps;
}

void RunConfig::validate() const {
  if (schemes.empty()) throw std::invalid_argument("config: no schemes");
  for (const auto& s : schemes) Scheme::parse(s);
  if (!(dx > 0.0)) throw std::invalid_argument("config: dx must be positive");
  if (!(b > a)) throw std::invalid_argument("config: need b > a");
  if (!(t_final >= t0)) throw std::invalid_argument("config: t_final precedes t0");
  if (!(base_dt > 0.0)) throw std::invalid_argument("config: base_dt must be positive");
  if (n_min < 0 || n_max < n_min) throw std::invalid_argument("config: need 0 <= n_min <= n_max");
  if (n_max > 30) throw std::invalid_argument("config: n_max above 30");
  switch (problem) {
    case ProblemId::advection:
      if (initial_condition != "sine" && initial_condition != "log_sine")
        throw std::invalid_argument("config: advection needs initial_condition sine or log_sine");
      break;
    case ProblemId::mkdv:
    case ProblemId::nls:
      if (initial_condition != "breather")
        throw std::invalid_argument("config: " + std::string(to_string(problem)) +
                                    " needs initial_condition breather");
      break;
  }
  resolve_topology(problem, boundary);
  if (problem == ProblemId::mkdv) MkdvBreather check(xi);
  if (problem == ProblemId::nls) NlsBreather check(beta, omega);
  solver.validate();
  const bool any_fitted = std::any_of(schemes.begin(), schemes.end(),
                                      [](const std::string& s) { return Scheme::parse(s).fitted(); });
  for (int n = n_min; n <= n_max; ++n) {
    const double dt = dt_for(n);
    if (any_fitted && std::abs(fitted_omega() * dt) >= fitted_limit)
      throw std::invalid_argument("config: omega*dt reaches pi at n = " + std::to_string(n));
  }
}

Topology resolve_topology(ProblemId problem, const std::string& boundary) {
  switch (problem) {
    case ProblemId::advection:
      if (boundary.empty() || boundary == "dirichlet") return Topology::dirichlet;
      break;
    case ProblemId::mkdv:
      if (boundary.empty() || boundary == "periodic") return Topology::periodic;
      if (boundary == "zero_ghost") return Topology::zero_ghost;
      break;
    case ProblemId::nls:
      if (boundary.empty() || boundary == "periodic") return Topology::periodic;
      break;
  }
  throw std::invalid_argument("boundary '" + boundary + "' is not available for " +
                              std::string(to_string(problem)));
}

ProblemSetup make_setup(const RunConfig& config) {
  ProblemSetup setup;
  switch (config.problem) {
    case ProblemId::advection: {
      const auto profile = config.initial_condition == "log_sine" ? AdvectionProfile::log_sine
                                                                  : AdvectionProfile::sine;
      setup.exact = advection_exact(profile, config.omega);
      const Grid grid = Grid::with_spacing(config.a, config.b, config.dx, Topology::dirichlet);
      auto closure = [exact = setup.exact](double x, double t) { return exact.evaluate(x, t)[0]; };
      setup.problem = std::make_shared<AdvectionProblem>(grid, config.omega, closure);
      break;
    }
    case ProblemId::mkdv: {
      setup.exact = mkdv_exact(MkdvBreather(config.xi));
      setup.problem = std::make_shared<MkdvProblem>(Grid::with_spacing(
          config.a, config.b, config.dx, resolve_topology(config.problem, config.boundary)));
      break;
    }
    case ProblemId::nls: {
      setup.exact = nls_exact(NlsBreather(config.beta, config.omega));
      setup.problem = std::make_shared<NlsProblem>(
          Grid::with_spacing(config.a, config.b, config.dx, resolve_topology(config.problem, config.boundary)));
      break;
    }
  }
  setup.initial_state = setup.exact.sample(setup.problem->grid(), config.t0);
  return setup;
}

std::vector<const ReportRow*> ExperimentReport::column(const std::string& scheme) const {
  std::vector<const ReportRow*> out;
  for (const auto& row : rows)
    if (row.scheme == scheme) out.push_back(&row);
  return out;
}

void assign_orders(ExperimentReport& report, const std::vector<std::string>& schemes) {
  for (const auto& scheme : schemes) {
    std::vector<ReportRow*> col;
    for (auto& row : report.rows)
      if (row.scheme == scheme && !row.failed) col.push_back(&row);
    for (auto* row : col) row->order.reset();
    if (col.size() < 2) continue;

    double floor = 0.0;
    const auto& last = *col.back();
    const auto& prev = *col[col.size() - 2];
    if (last.sol_err > 0.0 && prev.sol_err > 0.0 &&
        estimate_order(prev.sol_err, last.sol_err, prev.dt, last.dt) < 1.0) {
      floor = last.sol_err;
      for (auto* row : col) floor = std::min(floor, row->sol_err);
    }
    for (std::size_t k = 1; k < col.size(); ++k) {
      const auto& a = *col[k - 1];
      auto& b = *col[k];
      if (!(a.sol_err > 0.0) || !(b.sol_err > 0.0) || a.dt == b.dt) continue;
      if (floor > 0.0 && (a.sol_err <= 3.0 * floor || b.sol_err <= 3.0 * floor)) continue;
      b.order = estimate_order(as_printed(a.sol_err), as_printed(b.sol_err), as_printed(a.dt),
                               as_printed(b.dt));
    }
  }
}

ExperimentReport run_experiment(const RunConfig& config) {
  config.validate();
  struct Task {
    int n;
    std::size_t scheme;
  };
  std::vector<Task> tasks;
  for (int n = config.n_min; n <= config.n_max; ++n)
    for (std::size_t s = 0; s < config.schemes.size(); ++s) tasks.push_back({n, s});

  ExperimentReport report;
  report.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task task = tasks[k];
      ReportRow& row = report.rows[k];
      row.n = task.n;
      row.dt = config.dt_for(task.n);
      const Scheme scheme = Scheme::parse(config.schemes[task.scheme]);
      row.scheme = config.schemes[task.scheme];
      try {
        ProblemSetup setup = make_setup(config);
        const Trajectory traj =
            integrate(scheme, setup.problem, setup.initial_state, config.t0, config.t_final,
                      row.dt, config.fitted_omega(), config.solver);
        row.sol_err = solution_error(traj, setup.exact);
        row.err1 = conservation_error(traj, 1);
        row.err2 = conservation_error(traj, 2);
        for (int it : traj.newton_iterations)
          row.max_newton_iterations = std::max(row.max_newton_iterations, static_cast<std::size_t>(it));
      } catch (const std::exception& e) {
        row.failed = true;
        row.failure = e.what();
      }
    }
  };
  std::vector<std::jthread> pool;
  const std::size_t workers = worker_count(tasks.size());
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();

  assign_orders(report, config.schemes);
  return report;
}

RunConfig table_config(int id, int max_n) {
  RunConfig c;
  switch (id) {
    case 1:
      c.problem = ProblemId::advection;
      c.initial_condition = "sine";
      c.omega = 5.0;
      c.a = -1.0;
      c.b = 1.0;
      c.dx = 0.001;
      c.t_final = 1.0;
      c.base_dt = 0.1;
      c.n_max = 5;
      break;
    case 2:
      c.problem = ProblemId::advection;
      c.initial_condition = "log_sine";
      c.omega = 50.0;
      c.a = -1.0;
      c.b = 1.0;
      c.dx = 0.005;
      c.t_final = 1.0;
      c.base_dt = 0.005;
      c.n_max = 5;
      break;
    case 3:
      c.problem = ProblemId::mkdv;
      c.initial_condition = "breather";
      c.xi = 1.0;
      c.omega = 0.0;
      c.a = -2.0;
      c.b = 2.0;
      c.dx = 0.002;
      c.t_final = 0.2;
      c.base_dt = 0.0032;
      c.n_max = 3;
      break;
    case 4:
      c.problem = ProblemId::nls;
      c.initial_condition = "breather";
      c.beta = 1.4;
      c.omega = 25.0;
      c.a = -std::numbers::pi / 7.0;
      c.b = std::numbers::pi / 7.0;
      c.dx = 2.0 * std::numbers::pi / 7000.0;
      c.t_final = 0.5;
      c.base_dt = 0.01;
      c.n_max = 4;
      break;
    default:
      throw std::invalid_argument("unknown table id " + std::to_string(id) + " (expected 1-4)");
  }
  if (max_n >= 0) c.n_max = max_n;
  return c;
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "n,dt,scheme,sol_err,order,err1,err2\n";
  for (const auto& row : report.rows) {
    out << row.n << ',' << format_number(row.dt) << ',' << row.scheme << ',';
    if (row.failed) {
      out << ",,,\n";
      continue;
    }
    out << format_number(row.sol_err) << ',';
    if (row.order) out << format_order(*row.order);
    out << ',' << format_number(row.err1) << ',' << format_number(row.err2) << '\n';
  }
}

namespace {

using nlohmann::json;

JacobianMode parse_jacobian_mode(const std::string& s) {
  if (s == "analytic_banded") return JacobianMode::analytic_banded;
  if (s == "finite_difference_banded") return JacobianMode::finite_difference_banded;
  throw std::invalid_argument("config: unknown jacobian_mode '" + s + "'");
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  static const std::vector<std::string> known{
      "problem", "schemes", "omega", "dx", "t0", "t_final", "a", "b", "base_dt", "n_min",
      "n_max", "initial_condition", "xi", "beta", "boundary", "output", "solver"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw std::invalid_argument("config: unknown key '" + item.key() + "'");

  RunConfig c;
  try {
    if (j.contains("problem")) c.problem = parse_problem_id(j.at("problem").get<std::string>());
    if (c.problem != ProblemId::advection) c.initial_condition = "breather";
    if (j.contains("schemes")) c.schemes = j.at("schemes").get<std::vector<std::string>>();
    if (j.contains("omega")) c.omega = j.at("omega").get<double>();
    if (j.contains("dx")) c.dx = j.at("dx").get<double>();
    if (j.contains("t0")) c.t0 = j.at("t0").get<double>();
    if (j.contains("t_final")) c.t_final = j.at("t_final").get<double>();
    if (j.contains("a")) c.a = j.at("a").get<double>();
    if (j.contains("b")) c.b = j.at("b").get<double>();
    if (j.contains("base_dt")) c.base_dt = j.at("base_dt").get<double>();
    if (j.contains("n_min")) c.n_min = j.at("n_min").get<int>();
    if (j.contains("n_max")) c.n_max = j.at("n_max").get<int>();
    if (j.contains("initial_condition"))
      c.initial_condition = j.at("initial_condition").get<std::string>();
    if (j.contains("xi")) c.xi = j.at("xi").get<double>();
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("boundary")) c.boundary = j.at("boundary").get<std::string>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      if (s.contains("rel_tol")) c.solver.rel_tol = s.at("rel_tol").get<double>();
      if (s.contains("abs_tol")) c.solver.abs_tol = s.at("abs_tol").get<double>();
      if (s.contains("max_iters")) c.solver.max_iters = s.at("max_iters").get<int>();
      if (s.contains("jacobian_mode"))
        c.solver.jacobian_mode = parse_jacobian_mode(s.at("jacobian_mode").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: wrong value type: ") + e.what());
  }
  c.validate();
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["problem"] = std::string(to_string(c.problem));
  j["schemes"] = c.schemes;
  j["omega"] = c.omega;
  j["dx"] = c.dx;
  j["t0"] = c.t0;
  j["t_final"] = c.t_final;
  j["a"] = c.a;
  j["b"] = c.b;
  j["base_dt"] = c.base_dt;
  j["n_min"] = c.n_min;
  j["n_max"] = c.n_max;
  j["initial_condition"] = c.initial_condition;
  j["xi"] = c.xi;
  j["beta"] = c.beta;
  if (!c.boundary.empty()) j["boundary"] = c.boundary;
  if (!c.output.empty()) j["output"] = c.output;
  j["solver"] = {{"rel_tol", c.solver.rel_tol},
                 {"abs_tol", c.solver.abs_tol},
                 {"max_iters", c.solver.max_iters},
                 {"jacobian_mode", c.solver.jacobian_mode == JacobianMode::analytic_banded
                                       ? "analytic_banded"
                                       : "finite_difference_banded"}};
  return j.dump(2);
}

double DriftSummary::mean_over(double from, double to) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= from - 1e-12 && times[k] <= to + 1e-12) {
      sum += peak_x[k];
      ++count;
    }
  if (count == 0) throw std::invalid_argument("DriftSummary: empty time window");
  return sum / static_cast<double>(count);
}

DriftSummary drift_summary(const Trajectory& traj) {
  const Grid& grid = traj.problem->grid();
  const std::size_t comps = traj.problem->components();
  DriftSummary d;
  double running = 0.0;
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const auto& s = traj.states[n];
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
      double mag2 = 0.0;
      for (std::size_t c = 0; c < comps; ++c) mag2 += s[m * comps + c] * s[m * comps + c];
      if (mag2 > best_val) {
        best_val = mag2;
        best = m;
      }
    }
    d.times.push_back(traj.time(n));
    d.peak_x.push_back(grid.node(best));
    running += grid.node(best);
    d.running_mean.push_back(running / static_cast<double>(n + 1));
  }
  return d;
}

DemoResult breather_demo(const DemoConfig& cfg) {
  const Scheme scheme = Scheme::parse(cfg.scheme);
  std::shared_ptr<const SemidiscreteProblem> problem;
  ExactSolution exact;
  double omega = cfg.omega;
  switch (cfg.problem) {
    case ProblemId::mkdv: {
      const MkdvBreather breather(cfg.xi);
      omega = breather.omega();
      exact = mkdv_exact(breather);
      problem = std::make_shared<MkdvProblem>(
          Grid::with_spacing(cfg.a, cfg.b, cfg.dx, resolve_topology(cfg.problem, cfg.boundary)));
      break;
    }
    case ProblemId::nls: {
      exact = nls_exact(NlsBreather(cfg.beta, cfg.omega));
      problem = std::make_shared<NlsProblem>(
          Grid::with_spacing(cfg.a, cfg.b, cfg.dx, resolve_topology(cfg.problem, cfg.boundary)));
      break;
    }
    case ProblemId::advection:
      throw std::invalid_argument("breather_demo: advection has no breather");
  }
  DemoResult result;
  result.trajectory = integrate(scheme, problem, exact.sample(problem->grid(), cfg.t0), cfg.t0,
                                cfg.t_final, cfg.dt, omega);
  result.drift = drift_summary(result.trajectory);
  return result;
}

void write_field_csv(const Trajectory& traj, std::ostream& out, std::size_t stride) {
  const Grid& grid = traj.problem->grid();
  const std::size_t comps = traj.problem->components();
  out << (comps == 2 ? "t,x,u,v\n" : "t,x,u\n");
  stride = std::max<std::size_t>(stride, 1);
  for (std::size_t n = 0; n < traj.states.size(); n += stride) {
    const std::string t = format_number(traj.time(n));
    for (std::size_t m = 0; m < grid.size(); ++m) {
      out << t << ',' << format_number(grid.node(m));
      for (std::size_t c = 0; c < comps; ++c) out << ',' << format_number(traj.states[n][m * comps + c]);
      out << '\n';
    }
  }
}

void write_drift_csv(const DriftSummary& drift, std::ostream& out) {
  out << "t,peak_x,running_mean\n";
  for (std::size_t k = 0; k < drift.times.size(); ++k)
    out << format_number(drift.times[k]) << ',' << format_number(drift.peak_x[k]) << ','
        << format_number(drift.running_mean[k]) << '\n';
}

}  // namespace efit
