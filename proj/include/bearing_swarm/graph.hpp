#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bearing_swarm/errors.hpp"

namespace bearing_swarm {

/// Undirected edge stored with a canonical orientation tail < head.
/// Vertex ids are 1-based everywhere in the public API.
struct Edge {
  int tail;
  int head;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Fixed interaction topology plus the set of anchor agents (agents that know
/// their own absolute position). Edge order is preserved from construction:
/// row k of the incidence matrix corresponds to edges()[k].
class FormationGraph {
 public:
  FormationGraph(int vertex_count, const std::vector<std::pair<int, int>>& edges,
                 std::vector<int> anchors)
      : n_(vertex_count), anchors_(std::move(anchors)) {
    if (n_ < 1) throw InvalidGraph("vertex count must be >= 1, got " + std::to_string(n_));
    edges_.reserve(edges.size());
    for (auto [a, b] : edges) {
      check_vertex(a);
      check_vertex(b);
      if (a == b) throw InvalidGraph("self-loop at vertex " + std::to_string(a));
      Edge e{std::min(a, b), std::max(a, b)};
      if (edge_index_.count({e.tail, e.head}))
        throw InvalidGraph("duplicate edge (" + std::to_string(e.tail) + "," +
                           std::to_string(e.head) + ")");
      edge_index_[{e.tail, e.head}] = static_cast<int>(edges_.size());
      edges_.push_back(e);
    }
    if (anchors_.empty()) throw InvalidGraph("at least one anchor is required");
    for (int a : anchors_) check_vertex(a);
    std::sort(anchors_.begin(), anchors_.end());
    anchors_.erase(std::unique(anchors_.begin(), anchors_.end()), anchors_.end());

    adjacency_.assign(n_, {});
    for (const Edge& e : edges_) {
      adjacency_[e.tail - 1].push_back(e.head);
      adjacency_[e.head - 1].push_back(e.tail);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  }

  int vertex_count() const noexcept { return n_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Anchor ids, sorted ascending.
  const std::vector<int>& anchors() const noexcept { return anchors_; }

  bool is_anchor(int i) const {
    check_vertex(i);
    return std::binary_search(anchors_.begin(), anchors_.end(), i);
  }

  /// Neighbor ids of vertex i, sorted ascending.
  const std::vector<int>& neighbors(int i) const {
    if (i < 1 || i > n_)
      throw std::out_of_range("vertex id " + std::to_string(i) + " out of range [1," +
                              std::to_string(n_) + "]");
    return adjacency_[i - 1];
  }

  /// Index into edges() for the undirected pair {i,j}, or -1 if absent.
  int edge_index(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    auto it = edge_index_.find({std::min(i, j), std::max(i, j)});
    return it == edge_index_.end() ? -1 : it->second;
  }

  /// Oriented incidence matrix H (m x n): row k has -1 at the tail and +1 at
  /// the head of edges()[k].
  Eigen::MatrixXd incidence_matrix() const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(edge_count(), n_);
    for (int k = 0; k < edge_count(); ++k) {
      h(k, edges_[k].tail - 1) = -1.0;
      h(k, edges_[k].head - 1) = 1.0;
    }
    return h;
  }

  bool is_connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{1};
    seen[0] = 1;
    int reached = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      ++reached;
      for (int w : adjacency_[v - 1]) {
        if (!seen[w - 1]) {
          seen[w - 1] = 1;
          stack.push_back(w);
        }
      }
    }
    return reached == n_;
  }

 private:
  void check_vertex(int i) const {
    if (i < 1 || i > n_)
      throw InvalidGraph("vertex id " + std::to_string(i) + " out of range [1," +
                         std::to_string(n_) + "]");
  }

  int n_;
  std::vector<Edge> edges_;
  std::vector<int> anchors_;
  std::vector<std::vector<int>> adjacency_;
  std::map<std::pair<int, int>, int> edge_index_;
};

}  // namespace bearing_swarm
