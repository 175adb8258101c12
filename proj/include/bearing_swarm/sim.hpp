#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bearing_swarm/bearing.hpp"
#include "bearing_swarm/controller.hpp"
#include "bearing_swarm/errors.hpp"
#include "bearing_swarm/estimator.hpp"
#include "bearing_swarm/graph.hpp"
#include "bearing_swarm/reference.hpp"
#include "bearing_swarm/unicycle.hpp"

namespace bearing_swarm {

/// Full simulation state: every agent's pose and position estimate, plus the
/// current time.
struct SystemState {
  std::vector<AgentState> agents;
  std::vector<Eigen::Vector2d> estimates;
  double t = 0.0;
};

/// Flatten to the integrator layout: five entries per agent,
/// [x, y, theta, xhat, yhat].
inline Eigen::VectorXd pack_state(const SystemState& s) {
  Eigen::VectorXd y(5 * static_cast<Eigen::Index>(s.agents.size()));
  for (size_t i = 0; i < s.agents.size(); ++i) {
    y[5 * i + 0] = s.agents[i].x;
    y[5 * i + 1] = s.agents[i].y;
    y[5 * i + 2] = s.agents[i].theta;
    y[5 * i + 3] = s.estimates[i].x();
    y[5 * i + 4] = s.estimates[i].y();
  }
  return y;
}

inline SystemState unpack_state(const Eigen::VectorXd& y, double t) {
  if (y.size() % 5 != 0)
    throw std::invalid_argument("packed state length must be a multiple of 5");
  SystemState s;
  s.t = t;
  const size_t n = y.size() / 5;
  s.agents.resize(n);
  s.estimates.resize(n);
  for (size_t i = 0; i < n; ++i) {
    s.agents[i] = {y[5 * i + 0], y[5 * i + 1], y[5 * i + 2]};
    s.estimates[i] = {y[5 * i + 3], y[5 * i + 4]};
  }
  return s;
}

/// Everything a run needs. Fixed-step classical RK4 over [0, t_final]; every
/// record_every-th step lands in the trace.
struct SimConfig {
  FormationGraph graph;
  ScenarioSpec scenario;
  EstimatorGains gains;
  ControllerOptions controller;
  double dt = 0.01;
  double t_final = 0.0;
  int record_every = 1;
  std::vector<AgentState> initial_agents;
  std::vector<Eigen::Vector2d> initial_estimates;
  /// When set, agents apply these constant inputs instead of the tracking
  /// controller (the estimator still runs on the applied inputs).
  std::optional<std::vector<ControlInput>> open_loop_inputs;
  /// Optional symmetric actuator limits; unset means unconstrained.
  std::optional<double> v_limit;
  std::optional<double> omega_limit;
};

inline void validate_sim_config(const SimConfig& cfg) {
  const int n = cfg.graph.vertex_count();
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw ConfigError("dt must be positive and finite");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final))
    throw ConfigError("t_final must be nonnegative and finite");
  if (cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!(cfg.gains.k_p > 0.0)) throw ConfigError("k_p must be > 0");
  if (!(cfg.controller.position_gain > 0.0))
    throw ConfigError("position gain must be > 0");
  if (cfg.scenario.agent_count() != n)
    throw ConfigError("scenario covers " + std::to_string(cfg.scenario.agent_count()) +
                      " agents but the graph has " + std::to_string(n));
  if (static_cast<int>(cfg.initial_agents.size()) != n)
    throw ConfigError("initial poses: expected " + std::to_string(n) + " entries, got " +
                      std::to_string(cfg.initial_agents.size()));
  if (static_cast<int>(cfg.initial_estimates.size()) != n)
    throw ConfigError("initial estimates: expected " + std::to_string(n) + " entries, got " +
                      std::to_string(cfg.initial_estimates.size()));
  for (const AgentState& a : cfg.initial_agents)
    if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(a.theta))
      throw ConfigError("initial poses contain non-finite values");
  for (const auto& e : cfg.initial_estimates)
    if (!e.allFinite()) throw ConfigError("initial estimates contain non-finite values");
  if (cfg.open_loop_inputs && static_cast<int>(cfg.open_loop_inputs->size()) != n)
    throw ConfigError("open-loop inputs: expected " + std::to_string(n) + " entries");
  if (cfg.v_limit && !(*cfg.v_limit > 0.0)) throw ConfigError("v limit must be > 0");
  if (cfg.omega_limit && !(*cfg.omega_limit > 0.0)) throw ConfigError("omega limit must be > 0");
  try {
    validate_scenario(cfg.scenario);
  } catch (const InvalidScenario& e) {
    throw ConfigError(e.what());
  }
}

/// Per-row health metrics.
struct MetricsRow {
  std::vector<double> delta_norms;   ///< per-agent estimation error norms
  std::vector<double> ptilde_norms;  ///< per-agent tracking error norms
  double delta_norm = 0.0;           ///< stacked estimation error norm
  double ptilde_norm = 0.0;          ///< stacked tracking error norm
  double bearing_err_max = 0.0;      ///< max over edges of |g_ij - g*_ij(t)|
  double min_edge_dist = 0.0;        ///< min over edges of the true distance
  double lyapunov_w1 = 0.0;          ///< 0.5 * delta_norm^2
};

inline MetricsRow metrics(const SystemState& s, const ScenarioSpec& spec,
                          const FormationGraph& graph) {
  const int n = graph.vertex_count();
  MetricsRow row;
  row.delta_norms.resize(n);
  row.ptilde_norms.resize(n);
  double delta_sq = 0.0;
  double ptilde_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (s.estimates[i] - s.agents[i].position()).norm();
    const double p = (s.agents[i].position() - sample(spec, i + 1, s.t).p_star).norm();
    row.delta_norms[i] = d;
    row.ptilde_norms[i] = p;
    delta_sq += d * d;
    ptilde_sq += p * p;
  }
  row.delta_norm = std::sqrt(delta_sq);
  row.ptilde_norm = std::sqrt(ptilde_sq);
  row.lyapunov_w1 = 0.5 * delta_sq;
  row.bearing_err_max = 0.0;
  row.min_edge_dist = std::numeric_limits<double>::infinity();
  for (const Edge& e : graph.edges()) {
    const Eigen::Vector2d disp = s.agents[e.head - 1].position() - s.agents[e.tail - 1].position();
    const double len = disp.norm();
    if (!(len > kDegenerateEdgeLength)) throw DegenerateEdge(e.tail, e.head, len);
    row.min_edge_dist = std::min(row.min_edge_dist, len);
    const Eigen::Vector2d err = disp / len - desired_bearing(spec, e.tail, e.head, s.t);
    row.bearing_err_max = std::max(row.bearing_err_max, err.norm());
  }
  return row;
}

/// Coupled closed-loop dynamics of the whole team, packed in the integrator
/// layout. Bearings are measured from true positions each call; the
/// controller and estimator see only their structurally permitted inputs.
inline Eigen::VectorXd coupled_rhs(const SystemState& s, const SimConfig& cfg) {
  const int n = cfg.graph.vertex_count();
  const BearingField field = BearingField::measure(
      cfg.graph, [&] {
        std::vector<Eigen::Vector2d> p(n);
        for (int i = 0; i < n; ++i) p[i] = s.agents[i].position();
        return p;
      }());
  Eigen::VectorXd dy(5 * n);
  const double v_lim = cfg.v_limit.value_or(0.0);
  const double w_lim = cfg.omega_limit.value_or(0.0);
  for (int i = 0; i < n; ++i) {
    ControlInput u;
    if (cfg.open_loop_inputs) {
      u = (*cfg.open_loop_inputs)[i];
    } else {
      const ReferenceSample ref = sample(cfg.scenario, i + 1, s.t);
      u = control_law({ref.p_star, ref.v_star, ref.theta_star, ref.omega_star,
                       s.estimates[i], s.agents[i].theta},
                      cfg.controller);
    }
    u = clamp_input(u, v_lim, w_lim);
    const StateRates rates = unicycle_rhs(s.agents[i], u);
    const bool anchor = cfg.graph.is_anchor(i + 1);
    const auto views = gather_neighbor_views(cfg.graph, i + 1, s.estimates, field);
    const Eigen::Vector2d dest = estimator_rhs(
        s.estimates[i], views, anchor,
        anchor ? std::optional<Eigen::Vector2d>(s.agents[i].position()) : std::nullopt, u.v,
        s.agents[i].theta, cfg.gains, i + 1);
    dy[5 * i + 0] = rates.dx;
    dy[5 * i + 1] = rates.dy;
    dy[5 * i + 2] = rates.dtheta;
    dy[5 * i + 3] = dest.x();
    dy[5 * i + 4] = dest.y();
  }
  return dy;
}

struct TraceRow {
  double t = 0.0;
  std::vector<AgentState> agents;
  std::vector<Eigen::Vector2d> estimates;
  MetricsRow metrics;
};

struct SimTrace {
  std::vector<TraceRow> rows;
};

enum class RunStatus { Completed, CollisionFailure, NonFiniteState };

struct SimResult {
  SimTrace trace;
  RunStatus status = RunStatus::Completed;
  double failure_time = 0.0;  ///< time of the last valid state; a collision hit while
                              ///< evaluating an RK4 stage reports the step's start
  int failure_tail = -1;      ///< colliding edge, 1-based; -1 when not applicable
  int failure_head = -1;
  double min_edge_dist_overall = std::numeric_limits<double>::infinity();
};

/// Integrate the closed loop with classical fixed-step RK4. The trace holds
/// the initial row plus every record_every-th step; a collision or non-finite
/// state aborts the run with a truncated trace and a failure status.
inline SimResult integrate(const SimConfig& cfg) {
  validate_sim_config(cfg);
  const long n_steps = static_cast<long>(std::floor(cfg.t_final / cfg.dt + 1e-9));
  Eigen::VectorXd y = pack_state({cfg.initial_agents, cfg.initial_estimates, 0.0});

  SimResult result;
  auto scan_edges = [&](const Eigen::VectorXd& state) {
    // Track the all-step minimum and surface collisions between records.
    for (const Edge& e : cfg.graph.edges()) {
      const double len = (Eigen::Vector2d(state[5 * (e.head - 1)], state[5 * (e.head - 1) + 1]) -
                          Eigen::Vector2d(state[5 * (e.tail - 1)], state[5 * (e.tail - 1) + 1]))
                             .norm();
      if (!(len > kDegenerateEdgeLength)) throw DegenerateEdge(e.tail, e.head, len);
      result.min_edge_dist_overall = std::min(result.min_edge_dist_overall, len);
    }
  };
  auto record = [&](const Eigen::VectorXd& state, double t) {
    SystemState s = unpack_state(state, t);
    MetricsRow m = metrics(s, cfg.scenario, cfg.graph);
    result.trace.rows.push_back({t, std::move(s.agents), std::move(s.estimates), std::move(m)});
  };

  double t_cursor = 0.0;
  try {
    scan_edges(y);
    record(y, 0.0);
    for (long k = 0; k < n_steps; ++k) {
      const double t = static_cast<double>(k) * cfg.dt;
      t_cursor = t;
      const Eigen::VectorXd k1 = coupled_rhs(unpack_state(y, t), cfg);
      const Eigen::VectorXd k2 =
          coupled_rhs(unpack_state(y + 0.5 * cfg.dt * k1, t + 0.5 * cfg.dt), cfg);
      const Eigen::VectorXd k3 =
          coupled_rhs(unpack_state(y + 0.5 * cfg.dt * k2, t + 0.5 * cfg.dt), cfg);
      const Eigen::VectorXd k4 = coupled_rhs(unpack_state(y + cfg.dt * k3, t + cfg.dt), cfg);
      y += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double t_next = static_cast<double>(k + 1) * cfg.dt;
      t_cursor = t_next;
      if (!y.allFinite()) {
        result.status = RunStatus::NonFiniteState;
        result.failure_time = t_next;
        return result;
      }
      scan_edges(y);
      if ((k + 1) % cfg.record_every == 0) record(y, t_next);
    }
  } catch (const DegenerateEdge& e) {
    result.status = RunStatus::CollisionFailure;
    result.failure_time = t_cursor;
    result.failure_tail = e.tail;
    result.failure_head = e.head;
  }
  return result;
}

/// One agent's entry in the initial-condition audit. `allowed` values are the
/// sufficient bounds; a negative margin flags a violation.
struct InitialConditionAgentReport {
  int agent = 0;
  double sup_desired_speed = 0.0;
  double estimate_error = 0.0;
  double estimate_allowed = 0.0;
  double estimate_margin = 0.0;
  bool estimate_ok = false;
  double tracking_error = 0.0;
  double tracking_allowed = 0.0;
  double tracking_margin = 0.0;
  bool tracking_ok = false;
};

struct InitialConditionReport {
  double half_min_desired_edge = 0.0;  ///< half the infimum desired edge length
  std::vector<InitialConditionAgentReport> agents;

  bool all_ok() const {
    for (const auto& a : agents)
      if (!a.estimate_ok || !a.tracking_ok) return false;
    return true;
  }
};

/// Audit the sufficient initial-condition bounds: every agent's initial
/// estimate error must stay under (half the minimum desired edge length minus
/// that agent's peak desired speed), and its initial tracking error under
/// half the minimum desired edge length. The bounds are sufficient, not
/// necessary, so violations warrant a warning rather than a refusal to run.
inline InitialConditionReport check_initial_conditions(const SimConfig& cfg) {
  validate_sim_config(cfg);
  InitialConditionReport report;
  double min_edge = std::numeric_limits<double>::infinity();
  for (const Edge& e : cfg.graph.edges())
    min_edge =
        std::min(min_edge, inf_edge_distance(cfg.scenario, e.tail, e.head, cfg.t_final));
  report.half_min_desired_edge = 0.5 * min_edge;

  const int n = cfg.graph.vertex_count();
  report.agents.resize(n);
  for (int i = 0; i < n; ++i) {
    InitialConditionAgentReport& a = report.agents[i];
    a.agent = i + 1;
    a.sup_desired_speed = sup_speed(cfg.scenario, i + 1, cfg.t_final);
    a.estimate_error = (cfg.initial_estimates[i] - cfg.initial_agents[i].position()).norm();
    a.estimate_allowed = report.half_min_desired_edge - a.sup_desired_speed;
    a.estimate_margin = a.estimate_allowed - a.estimate_error;
    a.estimate_ok = a.estimate_error < a.estimate_allowed;
    a.tracking_error =
        (cfg.initial_agents[i].position() - sample(cfg.scenario, i + 1, 0.0).p_star).norm();
    a.tracking_allowed = report.half_min_desired_edge;
    a.tracking_margin = a.tracking_allowed - a.tracking_error;
    a.tracking_ok = a.tracking_error < a.tracking_allowed;
  }
  return report;
}

}  // namespace bearing_swarm
