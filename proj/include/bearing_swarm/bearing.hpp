#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bearing_swarm/errors.hpp"
#include "bearing_swarm/graph.hpp"

namespace bearing_swarm {

/// Displacements at or below this length (meters) have no well-defined
/// bearing and are treated as collisions.
inline constexpr double kDegenerateEdgeLength = 1e-9;

template <int D>
using VecD = Eigen::Matrix<double, D, 1>;
template <int D>
using MatD = Eigen::Matrix<double, D, D>;

/// Unit direction of a displacement. Throws DegenerateEdge when the
/// displacement is too short to normalize reliably.
template <int D = 2>
VecD<D> bearing(const VecD<D>& displacement) {
  const double len = displacement.norm();
  if (!(len > kDegenerateEdgeLength)) throw DegenerateEdge(len);
  return displacement / len;
}

/// Orthogonal projector onto the complement of span{g}. For unit g this is
/// symmetric, idempotent, and annihilates g.
template <int D = 2>
MatD<D> projector(const VecD<D>& g) {
  return MatD<D>::Identity() - g * g.transpose();
}

inline Eigen::VectorXd stack_positions(const std::vector<Eigen::Vector2d>& points) {
  Eigen::VectorXd out(2 * static_cast<Eigen::Index>(points.size()));
  for (size_t i = 0; i < points.size(); ++i) out.segment<2>(2 * i) = points[i];
  return out;
}

inline std::vector<Eigen::Vector2d> unstack_positions(const Eigen::VectorXd& stacked) {
  if (stacked.size() % 2 != 0)
    throw std::invalid_argument("stacked position vector has odd length");
  std::vector<Eigen::Vector2d> out(stacked.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) out[i] = stacked.segment<2>(2 * i);
  return out;
}

/// Bearing Laplacian of the configuration: the Dn x Dn PSD matrix assembled
/// from the per-edge projectors, with +P on the diagonal blocks of both
/// endpoints and -P on the corresponding off-diagonal blocks.
template <int D = 2>
Eigen::MatrixXd bearing_laplacian(const FormationGraph& graph, const Eigen::VectorXd& stacked) {
  const int n = graph.vertex_count();
  if (stacked.size() != D * n)
    throw std::invalid_argument("stacked configuration has length " +
                                std::to_string(stacked.size()) + ", expected " +
                                std::to_string(D * n));
  Eigen::MatrixXd lb = Eigen::MatrixXd::Zero(D * n, D * n);
  for (const Edge& e : graph.edges()) {
    const int a = e.tail - 1;
    const int b = e.head - 1;
    VecD<D> disp = stacked.template segment<D>(D * b) - stacked.template segment<D>(D * a);
    const double len = disp.norm();
    if (!(len > kDegenerateEdgeLength)) throw DegenerateEdge(e.tail, e.head, len);
    MatD<D> p = projector<D>(VecD<D>(disp / len));
    lb.template block<D, D>(D * a, D * a) += p;
    lb.template block<D, D>(D * b, D * b) += p;
    lb.template block<D, D>(D * a, D * b) -= p;
    lb.template block<D, D>(D * b, D * a) -= p;
  }
  return lb;
}

/// Block-diagonal anchor indicator: identity blocks at anchor vertices,
/// zero elsewhere.
template <int D = 2>
Eigen::MatrixXd anchor_matrix(const FormationGraph& graph) {
  const int n = graph.vertex_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(D * n, D * n);
  for (int id : graph.anchors())
    a.template block<D, D>(D * (id - 1), D * (id - 1)) = MatD<D>::Identity();
  return a;
}

/// Per-edge bearing measurements, possibly incomplete. Bearings are stored in
/// the canonical edge orientation and served in either direction.
class BearingField {
 public:
  explicit BearingField(const FormationGraph& graph)
      : graph_(&graph), values_(graph.edge_count()) {}

  /// Measure every edge of the graph from true positions. Throws
  /// DegenerateEdge (with edge attribution) on a collision.
  static BearingField measure(const FormationGraph& graph,
                              const std::vector<Eigen::Vector2d>& positions) {
    if (static_cast<int>(positions.size()) != graph.vertex_count())
      throw std::invalid_argument("positions size does not match vertex count");
    BearingField field(graph);
    for (int k = 0; k < graph.edge_count(); ++k) {
      const Edge& e = graph.edges()[k];
      Eigen::Vector2d disp = positions[e.head - 1] - positions[e.tail - 1];
      const double len = disp.norm();
      if (!(len > kDegenerateEdgeLength)) throw DegenerateEdge(e.tail, e.head, len);
      field.values_[k] = Eigen::Vector2d(disp / len);
    }
    return field;
  }

  /// Store the bearing pointing from i to j. The pair must be a graph edge.
  void set(int i, int j, const Eigen::Vector2d& g) {
    const int k = graph_->edge_index(i, j);
    if (k < 0)
      throw InvalidGraph("(" + std::to_string(i) + "," + std::to_string(j) + ") is not an edge");
    values_[k] = (i < j) ? g : Eigen::Vector2d(-g);
  }

  /// Bearing pointing from i to j. Throws MissingBearing when unset.
  Eigen::Vector2d bearing_to(int i, int j) const {
    const int k = graph_->edge_index(i, j);
    if (k < 0)
      throw InvalidGraph("(" + std::to_string(i) + "," + std::to_string(j) + ") is not an edge");
    if (!values_[k]) throw MissingBearing(i, j);
    return (i < j) ? *values_[k] : Eigen::Vector2d(-*values_[k]);
  }

  bool has(int i, int j) const {
    const int k = graph_->edge_index(i, j);
    if (k < 0)
      throw InvalidGraph("(" + std::to_string(i) + "," + std::to_string(j) + ") is not an edge");
    return values_[k].has_value();
  }

 private:
  const FormationGraph* graph_;
  std::vector<std::optional<Eigen::Vector2d>> values_;
};

}  // namespace bearing_swarm
