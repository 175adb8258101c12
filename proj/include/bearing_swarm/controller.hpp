#pragma once

#include <algorithm>

#include <Eigen/Dense>

#include "bearing_swarm/unicycle.hpp"

namespace bearing_swarm {

/// Everything one agent's tracking controller may read: its reference sample,
/// its own position estimate, and its own heading. True position is
/// deliberately absent.
struct ControlLawInput {
  Eigen::Vector2d p_star{0.0, 0.0};  ///< desired position
  double v_star = 0.0;               ///< desired forward speed
  double theta_star = 0.0;           ///< desired heading
  double omega_star = 0.0;           ///< desired turn rate
  Eigen::Vector2d p_hat{0.0, 0.0};   ///< the agent's estimate of its own position
  double theta = 0.0;                ///< the agent's actual heading
};

struct ControllerOptions {
  /// Gain on the estimated position error term.
  double position_gain = 1.0;
  /// When true, the turn-rate feedforward uses the reference heading's
  /// perpendicular instead of the agent's own.
  bool reference_frame_perp = false;
};

/// Observer-based tracking law: build the desired velocity
///   xi = g*(p_star - p_hat) + v_star h(theta_star) + omega_star h_perp
/// and realize it through the unicycle by projecting onto the agent's heading
/// frame: v = h . xi, omega = h_perp . xi.
inline ControlInput control_law(const ControlLawInput& in, const ControllerOptions& opt = {}) {
  const Eigen::Vector2d h = heading_vector(in.theta);
  const Eigen::Vector2d h_perp = heading_perp(in.theta);
  const Eigen::Vector2d feedforward_perp =
      opt.reference_frame_perp ? heading_perp(in.theta_star) : h_perp;
  const Eigen::Vector2d xi = opt.position_gain * (in.p_star - in.p_hat) +
                             in.v_star * heading_vector(in.theta_star) +
                             in.omega_star * feedforward_perp;
  return {h.dot(xi), h_perp.dot(xi)};
}

struct TrackingError {
  Eigen::Vector2d p_tilde{0.0, 0.0};  ///< p - p_star
  double norm = 0.0;
};

inline TrackingError tracking_error(const Eigen::Vector2d& position,
                                    const Eigen::Vector2d& p_star) {
  TrackingError err;
  err.p_tilde = position - p_star;
  err.norm = err.p_tilde.norm();
  return err;
}

/// Clamp a control input to symmetric actuator limits; a non-positive limit
/// means unconstrained.
inline ControlInput clamp_input(const ControlInput& u, double v_limit, double omega_limit) {
  ControlInput out = u;
  if (v_limit > 0.0) out.v = std::clamp(out.v, -v_limit, v_limit);
  if (omega_limit > 0.0) out.omega = std::clamp(out.omega, -omega_limit, omega_limit);
  return out;
}

}  // namespace bearing_swarm
