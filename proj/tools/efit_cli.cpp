#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "efit/checks.hpp"
#include "efit/experiment.hpp"

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int report_failures(const efit::ExperimentReport& report) {
  int failed = 0;
  for (const auto& row : report.rows)
    if (row.failed) {
      std::cerr << "row n=" << row.n << " scheme=" << row.scheme << " failed: " << row.failure << '\n';
      ++failed;
    }
  return failed == 0 ? 0 : 3;
}

int write_report(const efit::ExperimentReport& report, const std::string& path) {
  if (path.empty() || path == "-") {
    efit::write_report_csv(report, std::cout);
  } else {
    auto out = open_output(path);
    efit::write_report_csv(report, out);
  }
  return report_failures(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponentially fitted midpoint integration of conservative wave semidiscretizations"};
  app.require_subcommand(1);

  int table_id = 0;
  int max_n = -1;
  std::string table_out;
  auto* table = app.add_subcommand("table", "reproduce one of the four reference tables");
  table->add_option("--id", table_id, "table number")->required()->check(CLI::Range(1, 4));
  table->add_option("--max-n", max_n, "last refinement index")->check(CLI::NonNegativeNumber);
  table->add_option("--out", table_out, "CSV path ('-' for stdout)");

  std::string config_path, run_out;
  auto* run = app.add_subcommand("run", "run a JSON-configured convergence study");
  run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "CSV path (overrides the config's output)");

  std::string demo_problem = "mkdv", demo_scheme = "ef", demo_out, drift_out;
  double demo_T = -1.0;
  std::size_t stride = 1;
  auto* demo = app.add_subcommand("demo", "long breather run with a space-time dump");
  demo->add_option("--problem", demo_problem, "mkdv or nls")->required();
  demo->add_option("--scheme", demo_scheme, "classic, ef or ef_c1:<value>");
  demo->add_option("--t-final", demo_T, "final time");
  demo->add_option("--stride", stride, "keep every k-th time level in the dump")->check(CLI::PositiveNumber);
  demo->add_option("--out", demo_out, "field CSV path")->required();
  demo->add_option("--drift-out", drift_out, "drift CSV path (default: <out>.drift.csv)");

  auto* check = app.add_subcommand("check", "run the invariant and property suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*table) {
      const efit::RunConfig cfg = efit::table_config(table_id, max_n);
      return write_report(efit::run_experiment(cfg), table_out);
    }
    if (*run) {
      const efit::RunConfig cfg = efit::run_config_from_json(read_file(config_path));
      return write_report(efit::run_experiment(cfg), run_out.empty() ? cfg.output : run_out);
    }
    if (*demo) {
      efit::DemoConfig cfg;
      cfg.problem = efit::parse_problem_id(demo_problem);
      cfg.scheme = demo_scheme;
      if (cfg.problem == efit::ProblemId::nls) {
        cfg.a = -3.14159265358979323846 / 7.0;
        cfg.b = -cfg.a;
        cfg.dx = 2.0 * 3.14159265358979323846 / 7000.0;
        cfg.dt = 0.0025;
        cfg.t_final = 0.5;
      }
      if (demo_T >= 0.0) cfg.t_final = demo_T;
      const efit::DemoResult result = efit::breather_demo(cfg);
      auto field = open_output(demo_out);
      efit::write_field_csv(result.trajectory, field, stride);
      auto drift = open_output(drift_out.empty() ? demo_out + ".drift.csv" : drift_out);
      efit::write_drift_csv(result.drift, drift);
      if (cfg.t_final - cfg.t0 >= 10.0)
        std::cout << "mean peak location over t in [" << cfg.t_final - 10.0 << ", " << cfg.t_final
                  << "]: " << result.drift.mean_over(cfg.t_final - 10.0, cfg.t_final) << '\n';
      return 0;
    }
    if (*check) {
      int failed = 0;
      for (const auto& r : efit::run_property_checks()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        failed += r.passed ? 0 : 1;
      }
      return failed == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
