// Command-line front end: run / validate / sweep over config files.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bearing_swarm/bearing_swarm.hpp"

namespace fs = std::filesystem;
using namespace bearing_swarm;

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void print_report(const InitialConditionReport& report, std::ostream& os) {
  os << "initial-condition audit (half min desired edge length = "
     << short_num(report.half_min_desired_edge) << ")\n";
  for (const auto& a : report.agents) {
    os << "  agent " << a.agent << ": estimate error " << short_num(a.estimate_error)
       << " vs allowed " << short_num(a.estimate_allowed) << " margin "
       << short_num(a.estimate_margin) << (a.estimate_ok ? " ok" : " VIOLATED")
       << " | tracking error " << short_num(a.tracking_error) << " vs allowed "
       << short_num(a.tracking_allowed) << " margin " << short_num(a.tracking_margin)
       << (a.tracking_ok ? " ok" : " VIOLATED") << " | sup desired speed "
       << short_num(a.sup_desired_speed) << "\n";
  }
}

/// Integrate one validated config and write the full output set into out_dir.
/// Returns the run's exit code (0 completed, 2 failed).
int execute_run(const SimConfig& cfg, const InitialConditionReport& report,
                const fs::path& out_dir) {
  fs::create_directories(out_dir / "plots");
  {
    std::ofstream rf(out_dir / "report.txt");
    print_report(report, rf);
  }
  const SimResult result = integrate(cfg);
  const int n = cfg.graph.vertex_count();
  write_trace_csv(result.trace, n, (out_dir / "trace.csv").string());
  write_summary_csv(result, (out_dir / "summary.csv").string());
  write_errors_svg(result.trace, (out_dir / "plots" / "errors.svg").string());
  write_trajectories_svg(result.trace, cfg.scenario, (out_dir / "plots" / "trajectories.svg").string());
  if (result.status != RunStatus::Completed) {
    std::cerr << "run failed: " << run_status_name(result.status) << " at t="
              << short_num(result.failure_time);
    if (result.failure_tail > 0)
      std::cerr << " on edge (" << result.failure_tail << "," << result.failure_head << ")";
    std::cerr << "\n";
    return 2;
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  SimConfig cfg = load_sim_config(config_path);
  const InitialConditionReport report = check_initial_conditions(cfg);
  print_report(report, std::cout);
  if (!report.all_ok())
    std::cout << "warning: sufficient initial-condition bounds violated; running anyway "
                 "(the bounds are not necessary)\n";
  const int code = execute_run(cfg, report, out_dir);
  if (code == 0) {
    std::ifstream sf(fs::path(out_dir) / "summary.csv");
    std::string header, row;
    std::getline(sf, header);
    std::getline(sf, row);
    std::cout << "run completed; summary: " << row << "\n";
  }
  return code;
}

int cmd_validate(const std::string& config_path) {
  SimConfig cfg = load_sim_config(config_path);
  const InitialConditionReport report = check_initial_conditions(cfg);
  print_report(report, std::cout);
  if (report.all_ok()) {
    std::cout << "all initial conditions hold\n";
    return 0;
  }
  std::cout << "initial-condition bounds violated (sufficient only; a run may still converge)\n";
  return 3;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values_csv, const std::string& out_dir, int jobs) {
  if (param != "gains.k_p" && param != "sim.dt" && param.rfind("scenario.params.", 0) != 0) {
    std::cerr << "invalid param path: " << param
              << " (allowed: gains.k_p, sim.dt, scenario.params.*)\n";
    return 1;
  }
  std::vector<std::string> tokens;
  std::vector<double> values;
  {
    std::string cur;
    std::istringstream vs(values_csv);
    while (std::getline(vs, cur, ',')) {
      const size_t a = cur.find_first_not_of(" \t");
      const size_t b = cur.find_last_not_of(" \t");
      if (a == std::string::npos) continue;
      cur = cur.substr(a, b - a + 1);
      try {
        size_t used = 0;
        const double v = std::stod(cur, &used);
        if (used != cur.size()) throw std::invalid_argument(cur);
        tokens.push_back(cur);
        values.push_back(v);
      } catch (const std::exception&) {
        std::cerr << "invalid sweep value: '" << cur << "'\n";
        return 1;
      }
    }
  }
  if (values.empty()) {
    std::cerr << "no sweep values given\n";
    return 1;
  }

  const ConfigDoc base = parse_config_file(config_path);
  struct Job {
    ConfigDoc doc;
    fs::path dir;
    std::string token;
    int exit_code = 1;
    double delta_final = std::numeric_limits<double>::quiet_NaN();
    double ptilde_final = std::numeric_limits<double>::quiet_NaN();
    double min_edge = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<Job> runs;
  for (size_t i = 0; i < values.size(); ++i) {
    Job job;
    job.doc = base;
    set_param(job.doc, param, values[i]);
    build_sim_config(job.doc);  // surface config problems before launching anything
    job.dir = fs::path(out_dir) / tokens[i];
    job.token = tokens[i];
    runs.push_back(std::move(job));
  }

  if (jobs < 1) jobs = 1;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1)) {
      Job& job = runs[i];
      const SimConfig cfg = build_sim_config(job.doc);
      fs::create_directories(job.dir);
      std::ofstream cf(job.dir / "config.cfg");
      cf << serialize_config(job.doc);
      cf.close();
      job.exit_code = execute_run(cfg, check_initial_conditions(cfg), job.dir);
      // Pull the digest numbers back out of the summary the run just wrote.
      std::ifstream sf(job.dir / "summary.csv");
      std::string header, row;
      std::getline(sf, header);
      std::getline(sf, row);
      std::vector<std::string> cols;
      std::istringstream rs(row);
      std::string cell;
      while (std::getline(rs, cell, ',')) cols.push_back(cell);
      if (cols.size() >= 9) {
        job.delta_final = std::strtod(cols[4].c_str(), nullptr);
        job.ptilde_final = std::strtod(cols[6].c_str(), nullptr);
        job.min_edge = std::strtod(cols[8].c_str(), nullptr);
      }
    }
  };
  std::vector<std::thread> pool;
  const int worker_count = std::min<int>(jobs, static_cast<int>(runs.size()));
  for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  fs::create_directories(out_dir);
  std::ofstream ss(fs::path(out_dir) / "sweep_summary.csv");
  ss << "value,delta_norm_final,ptilde_norm_final,min_edge_dist_overall,exit_status\n";
  bool all_ok = true;
  for (const Job& job : runs) {
    ss << job.token << ',' << format_double(job.delta_final) << ','
       << format_double(job.ptilde_final) << ',' << format_double(job.min_edge) << ','
       << job.exit_code << "\n";
    all_ok = all_ok && job.exit_code == 0;
  }
  std::cout << "sweep finished: " << runs.size() << " runs, summary at "
            << (fs::path(out_dir) / "sweep_summary.csv").string() << "\n";
  return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bearing-based formation localization + tracking simulator"};
  app.require_subcommand(1);
  app.footer("The BEARING_SWARM_SEED environment variable is reserved for future stochastic\n"
             "extensions; the current core is deterministic and ignores it.");

  std::string config_path, out_dir, param, values;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  CLI::App* run = app.add_subcommand("run", "integrate a run; write trace.csv, summary.csv, plots/");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  CLI::App* validate =
      app.add_subcommand("validate", "audit the sufficient initial-condition bounds");
  validate->add_option("--config", config_path, "config file")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run once per parameter value; aggregate results");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--param", param, "dotted parameter path (gains.k_p, sim.dt, scenario.params.*)")
      ->required();
  sweep->add_option("--values", values, "comma-separated numeric values")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--jobs", jobs, "max parallel runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (validate->parsed()) return cmd_validate(config_path);
    return cmd_sweep(config_path, param, values, out_dir, jobs);
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
