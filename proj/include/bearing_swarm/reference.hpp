#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bearing_swarm/bearing.hpp"
#include "bearing_swarm/errors.hpp"

namespace bearing_swarm {

/// One agent's reference trajectory evaluated at a single time: desired pose,
/// velocity, and the feedforward pair (v_star, omega_star). The fields are
/// consistent: p_star_dot = v_star * (cos theta_star, sin theta_star).
struct ReferenceSample {
  Eigen::Vector2d p_star{0.0, 0.0};
  Eigen::Vector2d p_star_dot{0.0, 0.0};
  double theta_star = 0.0;
  double v_star = 0.0;
  double omega_star = 0.0;
};

/// Rigid translation along +x at speed `speed`, with a sinusoidal sideways
/// sway: every agent's offset from its base point is
/// (speed*t, amplitude*sin(spatial_freq*speed*t)). Inter-agent displacements
/// (hence desired bearings) are constant in time.
struct SinusoidParams {
  double amplitude = 2.0;
  double spatial_freq = 0.1;
  double speed = 1.0;
};

/// Rigid rotation of the whole base formation about a fixed center at angular
/// rate omega0. Desired bearings rotate with the formation. An agent placed
/// exactly at the center has zero desired speed, which breaks the tracking
/// controller's persistent-excitation assumption; such placements are
/// rejected unless allow_zero_speed is set.
struct RotationParams {
  Eigen::Vector2d center{0.0, -10.0};
  double omega0 = 0.3;
  bool allow_zero_speed = false;
};

/// Arbitrary caller-supplied trajectory: sampler(agent_id, t) must return a
/// self-consistent ReferenceSample with theta_star continuous in t. Speed and
/// edge-distance bounds for this kind are audited by dense time sampling.
struct CustomScenario {
  std::function<ReferenceSample(int, double)> sampler;
};

enum class ScenarioKind { SinusoidTranslation, RotationAboutPoint, Custom };

/// A reference trajectory family for the whole team: the formation's base
/// points (desired positions at t = 0 for the built-in kinds) plus the motion
/// parameters.
struct ScenarioSpec {
  std::vector<Eigen::Vector2d> base_formation;
  std::variant<SinusoidParams, RotationParams, CustomScenario> params;

  ScenarioKind kind() const { return static_cast<ScenarioKind>(params.index()); }
  int agent_count() const { return static_cast<int>(base_formation.size()); }
};

inline ScenarioSpec make_sinusoid(std::vector<Eigen::Vector2d> base, SinusoidParams p = {}) {
  return {std::move(base), p};
}

inline ScenarioSpec make_rotation(std::vector<Eigen::Vector2d> base, RotationParams p = {}) {
  return {std::move(base), p};
}

inline ScenarioSpec make_custom(std::vector<Eigen::Vector2d> base, CustomScenario c) {
  return {std::move(base), std::move(c)};
}

/// Wrap an angle difference into [-pi, pi].
inline double wrap_to_pi(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

inline void validate_scenario(const ScenarioSpec& spec) {
  if (spec.base_formation.empty()) throw InvalidScenario("base formation is empty");
  for (const auto& p : spec.base_formation)
    if (!p.allFinite()) throw InvalidScenario("base formation contains non-finite coordinates");

  if (const auto* s = std::get_if<SinusoidParams>(&spec.params)) {
    if (!(s->speed > 0.0))
      throw InvalidScenario("sinusoid speed must be > 0, got " + std::to_string(s->speed));
    if (!std::isfinite(s->amplitude) || !std::isfinite(s->spatial_freq))
      throw InvalidScenario("sinusoid parameters must be finite");
  } else if (const auto* r = std::get_if<RotationParams>(&spec.params)) {
    if (!(std::abs(r->omega0) > 0.0) || !std::isfinite(r->omega0))
      throw InvalidScenario("rotation rate must be nonzero and finite");
    if (!r->center.allFinite()) throw InvalidScenario("rotation center must be finite");
    if (!r->allow_zero_speed) {
      for (size_t i = 0; i < spec.base_formation.size(); ++i) {
        const double radius = (spec.base_formation[i] - r->center).norm();
        if (!(radius > kDegenerateEdgeLength))
          throw InvalidScenario("agent " + std::to_string(i + 1) +
                                " sits at the rotation center (desired speed would be zero); "
                                "set allow_zero_speed to permit this");
      }
    }
  } else if (const auto* c = std::get_if<CustomScenario>(&spec.params)) {
    if (!c->sampler) throw InvalidScenario("custom scenario has no sampler");
  }
}

/// Evaluate agent i's reference at time t. Agent ids are 1-based.
inline ReferenceSample sample(const ScenarioSpec& spec, int i, double t) {
  if (i < 1 || i > spec.agent_count())
    throw std::out_of_range("agent id " + std::to_string(i) + " out of range [1," +
                            std::to_string(spec.agent_count()) + "]");
  const Eigen::Vector2d& base = spec.base_formation[i - 1];

  if (const auto* s = std::get_if<SinusoidParams>(&spec.params)) {
    const double phase = s->spatial_freq * s->speed * t;
    ReferenceSample out;
    out.p_star = base + Eigen::Vector2d(s->speed * t, s->amplitude * std::sin(phase));
    const double slope = s->amplitude * s->spatial_freq * std::cos(phase);
    out.p_star_dot = {s->speed, s->speed * slope};
    out.v_star = s->speed * std::sqrt(1.0 + slope * slope);
    out.theta_star = std::atan2(out.p_star_dot.y(), out.p_star_dot.x());
    // Curvature of y = A sin(w x) scaled by path speed.
    out.omega_star =
        -s->amplitude * s->spatial_freq * s->spatial_freq * s->speed * std::sin(phase) /
        (1.0 + slope * slope);
    return out;
  }

  if (const auto* r = std::get_if<RotationParams>(&spec.params)) {
    const Eigen::Vector2d arm = base - r->center;
    const double radius = arm.norm();
    const double angle = r->omega0 * t;
    const Eigen::Vector2d rotated{arm.x() * std::cos(angle) - arm.y() * std::sin(angle),
                                  arm.x() * std::sin(angle) + arm.y() * std::cos(angle)};
    ReferenceSample out;
    out.p_star = r->center + rotated;
    out.p_star_dot = r->omega0 * Eigen::Vector2d(-rotated.y(), rotated.x());
    out.v_star = std::abs(r->omega0) * radius;
    // Continuous (unwrapped) tangent heading; for a center agent the phase
    // angle defaults to 0 so the heading is pi/2 * sign(omega0) + omega0*t.
    const double phase0 = std::atan2(arm.y(), arm.x());
    out.theta_star = phase0 + std::copysign(std::numbers::pi / 2.0, r->omega0) + angle;
    out.omega_star = r->omega0;
    return out;
  }

  return std::get<CustomScenario>(spec.params).sampler(i, t);
}

/// Desired bearing from agent i to agent j at time t. Throws DegenerateEdge
/// when the desired displacement is shorter than the degeneracy threshold.
inline Eigen::Vector2d desired_bearing(const ScenarioSpec& spec, int i, int j, double t) {
  const Eigen::Vector2d disp = sample(spec, j, t).p_star - sample(spec, i, t).p_star;
  const double len = disp.norm();
  if (!(len > kDegenerateEdgeLength)) throw DegenerateEdge(i, j, len);
  return disp / len;
}

namespace detail {
inline constexpr int kAuditSamples = 2048;

template <typename F>
double sampled_max(double horizon, F&& f) {
  double best = f(0.0);
  if (horizon > 0.0) {
    for (int k = 1; k <= kAuditSamples; ++k)
      best = std::max(best, f(horizon * k / kAuditSamples));
  }
  return best;
}

template <typename F>
double sampled_min(double horizon, F&& f) {
  double best = f(0.0);
  if (horizon > 0.0) {
    for (int k = 1; k <= kAuditSamples; ++k)
      best = std::min(best, f(horizon * k / kAuditSamples));
  }
  return best;
}
}  // namespace detail

/// Supremum of agent i's desired speed over [0, horizon]. Closed form for the
/// built-in kinds; dense sampling for Custom.
inline double sup_speed(const ScenarioSpec& spec, int i, double horizon) {
  if (i < 1 || i > spec.agent_count())
    throw std::out_of_range("agent id " + std::to_string(i) + " out of range");
  if (const auto* s = std::get_if<SinusoidParams>(&spec.params)) {
    // |cos| peaks at 1, attained at t = 0.
    const double peak = s->amplitude * s->spatial_freq;
    return s->speed * std::sqrt(1.0 + peak * peak);
  }
  if (const auto* r = std::get_if<RotationParams>(&spec.params))
    return std::abs(r->omega0) * (spec.base_formation[i - 1] - r->center).norm();
  return detail::sampled_max(horizon, [&](double t) { return sample(spec, i, t).v_star; });
}

/// Infimum of the desired distance between agents i and j over [0, horizon].
/// The built-in kinds move the formation rigidly, so the distance is constant.
inline double inf_edge_distance(const ScenarioSpec& spec, int i, int j, double horizon) {
  if (i < 1 || i > spec.agent_count() || j < 1 || j > spec.agent_count())
    throw std::out_of_range("agent id out of range");
  if (!std::holds_alternative<CustomScenario>(spec.params))
    return (spec.base_formation[j - 1] - spec.base_formation[i - 1]).norm();
  return detail::sampled_min(horizon, [&](double t) {
    return (sample(spec, j, t).p_star - sample(spec, i, t).p_star).norm();
  });
}

/// Largest discrepancy between central finite differences of (p_star,
/// theta_star) over [t-h, t+h] and the analytic rates reported at t.
/// Heading differences are wrapped so full-turn branch cuts do not register.
inline double finite_difference_audit(const ScenarioSpec& spec, int i, double t, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("audit step must be > 0");
  const ReferenceSample mid = sample(spec, i, t);
  const ReferenceSample lo = sample(spec, i, t - h);
  const ReferenceSample hi = sample(spec, i, t + h);
  const Eigen::Vector2d dp = (hi.p_star - lo.p_star) / (2.0 * h);
  const double dtheta = wrap_to_pi(hi.theta_star - lo.theta_star) / (2.0 * h);
  return std::max((dp - mid.p_star_dot).norm(), std::abs(dtheta - mid.omega_star));
}

}  // namespace bearing_swarm
