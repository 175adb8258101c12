#include "bearing_swarm/trace_csv.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "bearing_swarm/svg_plot.hpp"
#include "test_util.hpp"

using namespace bearing_swarm;

namespace {

// Minimal well-formedness scan: every opened tag is closed in order.
bool xml_balanced(const std::string& s) {
  std::vector<std::string> stack;
  size_t i = 0;
  while ((i = s.find('<', i)) != std::string::npos) {
    const size_t close = s.find('>', i);
    if (close == std::string::npos) return false;
    std::string tag = s.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.empty()) return false;
    if (tag.front() == '?') continue;
    if (tag.front() == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    if (tag.back() == '/') continue;
    stack.push_back(tag.substr(0, tag.find_first_of(" \t")));
  }
  return stack.empty();
}

SimResult tiny_rotation_run(double t_final = 2.0) {
  SimConfig cfg = bs_test::make_sim_config(
      FormationGraph(2, {{1, 2}}, {1}),
      make_rotation({{2.0, 0.0}, {0.0, 3.0}}, {{0.0, 0.0}, 0.5, false}));
  cfg.dt = 0.01;
  cfg.t_final = t_final;
  cfg.record_every = 5;
  cfg.initial_agents = {{2.1, 0.2, 1.5}, {-0.2, 3.1, -0.5}};
  cfg.initial_estimates = {{2.0, 0.3}, {0.1, 2.8}};
  return integrate(cfg);
}

TEST(Io, FormatDoubleRoundTrips) {
  const double values[] = {0.1,
                           1.0 / 3.0,
                           1e300,
                           1e-300,
                           3.141592653589793,
                           -123456789.123456789,
                           5e-324,
                           0.0};
  for (double v : values) {
    const double back = std::strtod(format_double(v).c_str(), nullptr);
    EXPECT_EQ(back, v) << format_double(v);
  }
  const double neg_zero = std::strtod(format_double(-0.0).c_str(), nullptr);
  EXPECT_TRUE(std::signbit(neg_zero));
}

TEST(Io, TraceHeaderGolden) {
  EXPECT_EQ(trace_csv_header(3),
            "t,x1,y1,theta1,xhat1,yhat1,x2,y2,theta2,xhat2,yhat2,"
            "x3,y3,theta3,xhat3,yhat3,delta_norm,ptilde_norm,bearing_err_max,min_edge_dist,W1");
  std::istringstream h7(trace_csv_header(7));
  std::vector<std::string> cols;
  std::string c;
  while (std::getline(h7, c, ',')) cols.push_back(c);
  EXPECT_EQ(cols.size(), 1u + 7u * 5u + 5u);
  EXPECT_EQ(cols.front(), "t");
  EXPECT_EQ(cols.back(), "W1");
  EXPECT_EQ(cols[1], "x1");
  EXPECT_EQ(cols[35], "yhat7");
}

TEST(Io, TraceCsvWritesExactValues) {
  SimTrace trace;
  TraceRow row;
  row.t = 0.30000000000000004;
  row.agents = {{1.0 / 7.0, -2.5, 0.7853981633974483}};
  row.estimates = {{0.14, -2.49}};
  row.metrics.delta_norm = 0.0103;
  row.metrics.ptilde_norm = 1e-9;
  row.metrics.bearing_err_max = 0.25;
  row.metrics.min_edge_dist = std::numeric_limits<double>::infinity();
  row.metrics.lyapunov_w1 = 5.3045e-05;
  trace.rows = {row};

  std::ostringstream os;
  write_trace_csv(trace, 1, os);
  std::istringstream is(os.str());
  std::string header, data, extra;
  ASSERT_TRUE(std::getline(is, header));
  ASSERT_TRUE(std::getline(is, data));
  EXPECT_FALSE(std::getline(is, extra));
  EXPECT_EQ(header, trace_csv_header(1));

  std::vector<double> fields;
  std::istringstream ds(data);
  std::string cell;
  while (std::getline(ds, cell, ',')) fields.push_back(std::strtod(cell.c_str(), nullptr));
  ASSERT_EQ(fields.size(), 11u);
  EXPECT_EQ(fields[0], row.t);
  EXPECT_EQ(fields[1], row.agents[0].x);
  EXPECT_EQ(fields[3], row.agents[0].theta);
  EXPECT_EQ(fields[5], row.estimates[0].y());
  EXPECT_EQ(fields[6], row.metrics.delta_norm);
  EXPECT_EQ(fields[7], row.metrics.ptilde_norm);
  EXPECT_TRUE(std::isinf(fields[9]));
  EXPECT_EQ(fields[10], row.metrics.lyapunov_w1);
}

TEST(Io, SummaryForCompletedRun) {
  const SimResult r = tiny_rotation_run();
  const auto dir = bs_test::fresh_dir("io_summary");
  write_summary_csv(r, (dir / "summary.csv").string());
  const bs_test::Csv csv = bs_test::read_csv(dir / "summary.csv");
  ASSERT_EQ(csv.rows.size(), 1u);
  ASSERT_EQ(csv.header.size(), 12u);
  ASSERT_EQ(csv.rows[0].size(), 12u);
  EXPECT_EQ(csv.rows[0][csv.col("status")], "completed");
  EXPECT_EQ(csv.num(0, "rows"), static_cast<double>(r.trace.rows.size()));
  EXPECT_NEAR(csv.num(0, "t_end"), 2.0, 1e-12);
  EXPECT_EQ(csv.num(0, "delta_norm_final"), r.trace.rows.back().metrics.delta_norm);
  EXPECT_EQ(csv.num(0, "ptilde_norm_initial"), r.trace.rows.front().metrics.ptilde_norm);
  EXPECT_EQ(csv.num(0, "min_edge_dist_overall"), r.min_edge_dist_overall);
  EXPECT_EQ(csv.rows[0][csv.col("failure_time")], "");
  EXPECT_EQ(csv.rows[0][csv.col("failure_edge")], "");
}

TEST(Io, SummaryForCollisionRun) {
  SimConfig cfg = bs_test::make_sim_config(
      FormationGraph(2, {{1, 2}}, {1}),
      make_sinusoid({{0.0, 0.0}, {2.0, 0.0}}, {0.0, 0.1, 1.0}));
  cfg.dt = 0.25;
  cfg.t_final = 2.0;
  cfg.open_loop_inputs = std::vector<ControlInput>{{1.0, 0.0}, {-1.0, 0.0}};
  cfg.initial_agents = {{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}};
  cfg.initial_estimates = {{0.0, 0.0}, {2.0, 0.0}};
  const SimResult r = integrate(cfg);
  ASSERT_EQ(r.status, RunStatus::CollisionFailure);

  const auto dir = bs_test::fresh_dir("io_collision");
  write_summary_csv(r, (dir / "summary.csv").string());
  const bs_test::Csv csv = bs_test::read_csv(dir / "summary.csv");
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][csv.col("status")], "collision");
  EXPECT_EQ(csv.num(0, "rows"), 4.0);
  // Failure surfaces inside the last RK4 stage of the step starting at 0.75.
  EXPECT_NEAR(csv.num(0, "failure_time"), 0.75, 1e-12);
  EXPECT_EQ(csv.rows[0][csv.col("failure_edge")], "1-2");
}

TEST(Io, SvgPlotsWellFormedAndDeterministic) {
  const SimResult r = tiny_rotation_run();
  const ScenarioSpec spec =
      make_rotation({{2.0, 0.0}, {0.0, 3.0}}, {{0.0, 0.0}, 0.5, false});
  const auto dir = bs_test::fresh_dir("io_svg");

  write_errors_svg(r.trace, (dir / "errors.svg").string());
  write_trajectories_svg(r.trace, spec, (dir / "traj.svg").string());
  const std::string errors = bs_test::read_file(dir / "errors.svg");
  const std::string traj = bs_test::read_file(dir / "traj.svg");

  for (const std::string& svg : {errors, traj}) {
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_TRUE(xml_balanced(svg));
    EXPECT_NE(svg.find("<svg "), std::string::npos);
    EXPECT_NE(svg.find("<polyline "), std::string::npos);
  }
  EXPECT_NE(errors.find("tracking error"), std::string::npos);
  EXPECT_NE(errors.find("estimation error"), std::string::npos);
  EXPECT_NE(traj.find("desired (dashed)"), std::string::npos);

  write_errors_svg(r.trace, (dir / "errors2.svg").string());
  write_trajectories_svg(r.trace, spec, (dir / "traj2.svg").string());
  EXPECT_EQ(bs_test::read_file(dir / "errors2.svg"), errors);
  EXPECT_EQ(bs_test::read_file(dir / "traj2.svg"), traj);
}

TEST(Io, SvgEmptyTraceFallback) {
  const auto dir = bs_test::fresh_dir("io_svg_empty");
  write_errors_svg(SimTrace{}, (dir / "empty.svg").string());
  const std::string svg = bs_test::read_file(dir / "empty.svg");
  EXPECT_NE(svg.find("empty trace"), std::string::npos);
  EXPECT_TRUE(xml_balanced(svg));
}

TEST(Io, RunStatusNames) {
  EXPECT_STREQ(run_status_name(RunStatus::Completed), "completed");
  EXPECT_STREQ(run_status_name(RunStatus::CollisionFailure), "collision");
  EXPECT_STREQ(run_status_name(RunStatus::NonFiniteState), "nonfinite");
}

}  // namespace
