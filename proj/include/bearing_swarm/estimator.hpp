#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bearing_swarm/bearing.hpp"
#include "bearing_swarm/graph.hpp"
#include "bearing_swarm/unicycle.hpp"

namespace bearing_swarm {

struct EstimatorGains {
  double k_p = 1.0;
};

/// What agent i knows about one neighbor: that neighbor's broadcast estimate
/// and the measured bearing pointing from i toward it.
struct NeighborView {
  Eigen::Vector2d estimate{0.0, 0.0};
  Eigen::Vector2d bearing_to_neighbor{0.0, 0.0};
};

/// Assemble agent i's neighbor views from the shared estimate list and the
/// measured bearing field. Throws MissingBearing when the field lacks an
/// incident edge.
inline std::vector<NeighborView> gather_neighbor_views(
    const FormationGraph& graph, int i, const std::vector<Eigen::Vector2d>& estimates,
    const BearingField& bearings) {
  if (static_cast<int>(estimates.size()) != graph.vertex_count())
    throw std::invalid_argument("estimates size does not match vertex count");
  std::vector<NeighborView> views;
  views.reserve(graph.neighbors(i).size());
  for (int j : graph.neighbors(i))
    views.push_back({estimates[j - 1], bearings.bearing_to(i, j)});
  return views;
}

/// Time derivative of one agent's position estimate. Each neighbor term
/// projects the estimate disagreement onto the complement of the measured
/// bearing; anchors additionally damp their own absolute error, and the
/// agent's dead-reckoned velocity v*h(theta) rides along as feedforward.
/// Structurally local: only the agent's own state and its neighbor views are
/// readable here.
inline Eigen::Vector2d estimator_rhs(const Eigen::Vector2d& own_estimate,
                                     std::span<const NeighborView> neighbors, bool is_anchor,
                                     const std::optional<Eigen::Vector2d>& true_position,
                                     double v, double theta, const EstimatorGains& gains,
                                     int agent_id = -1) {
  Eigen::Vector2d consensus = Eigen::Vector2d::Zero();
  for (const NeighborView& nb : neighbors)
    consensus += projector<2>(nb.bearing_to_neighbor) * (own_estimate - nb.estimate);
  Eigen::Vector2d anchor_pull = Eigen::Vector2d::Zero();
  if (is_anchor) {
    if (!true_position) throw AnchorWithoutPosition(agent_id);
    anchor_pull = own_estimate - *true_position;
  }
  return -gains.k_p * (consensus + anchor_pull) + v * heading_vector(theta);
}

/// The linear map governing the stacked estimation error: -k_p (L_B + A)
/// evaluated at the true configuration. Used as the matrix-form oracle for
/// the distributed update above.
inline Eigen::MatrixXd error_system_matrix(const FormationGraph& graph,
                                           const Eigen::VectorXd& stacked_positions,
                                           const EstimatorGains& gains) {
  return -gains.k_p *
         (bearing_laplacian<2>(graph, stacked_positions) + anchor_matrix<2>(graph));
}

struct EstimationError {
  std::vector<Eigen::Vector2d> delta;  ///< per-agent estimate minus truth
  double total_norm = 0.0;             ///< norm of the stacked error
};

inline EstimationError estimation_error(const std::vector<Eigen::Vector2d>& estimates,
                                        const std::vector<Eigen::Vector2d>& positions) {
  if (estimates.size() != positions.size())
    throw std::invalid_argument("estimates and positions differ in length");
  EstimationError out;
  out.delta.resize(estimates.size());
  double sq = 0.0;
  for (size_t i = 0; i < estimates.size(); ++i) {
    out.delta[i] = estimates[i] - positions[i];
    sq += out.delta[i].squaredNorm();
  }
  out.total_norm = std::sqrt(sq);
  return out;
}

}  // namespace bearing_swarm
