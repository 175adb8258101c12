#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace bearing_swarm {

/// Planar unicycle pose. theta is not wrapped: it accumulates continuously so
/// traces stay differentiable across full turns.
struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
};

/// Forward speed and turn rate.
struct ControlInput {
  double v = 0.0;
  double omega = 0.0;
};

struct StateRates {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

/// Unit heading vector for orientation theta.
inline Eigen::Vector2d heading_vector(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

/// Heading rotated +90 degrees (left of travel).
inline Eigen::Vector2d heading_perp(double theta) {
  return {-std::sin(theta), std::cos(theta)};
}

/// Kinematics: the agent moves along its heading at speed v and turns at
/// rate omega.
inline StateRates unicycle_rhs(const AgentState& state, const ControlInput& input) {
  return {input.v * std::cos(state.theta), input.v * std::sin(state.theta), input.omega};
}

}  // namespace bearing_swarm
