#pragma once

#include <stdexcept>
#include <string>

namespace bearing_swarm {

/// Base class for all library-specific failures.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph input: self-loop, duplicate edge, bad vertex id, no anchors.
class InvalidGraph : public SimError {
 public:
  using SimError::SimError;
};

/// An inter-agent displacement shrank below the degeneracy threshold, so its
/// bearing is undefined. Vertex ids are 1-based; (-1,-1) means the offending
/// edge was not attributed by the caller.
class DegenerateEdge : public SimError {
 public:
  explicit DegenerateEdge(double length)
      : SimError("degenerate edge: length " + std::to_string(length)), length(length) {}
  DegenerateEdge(int tail, int head, double length)
      : SimError("degenerate edge (" + std::to_string(tail) + "," + std::to_string(head) +
                 "): length " + std::to_string(length)),
        tail(tail),
        head(head),
        length(length) {}

  int tail = -1;
  int head = -1;
  double length = 0.0;
};

/// A bearing required by the estimator was never measured.
class MissingBearing : public SimError {
 public:
  MissingBearing(int tail, int head)
      : SimError("no bearing measured for edge (" + std::to_string(tail) + "," +
                 std::to_string(head) + ")"),
        tail(tail),
        head(head) {}

  int tail;
  int head;
};

/// An anchor agent was asked to correct its estimate without knowing its own
/// true position.
class AnchorWithoutPosition : public SimError {
 public:
  explicit AnchorWithoutPosition(int agent)
      : SimError("anchor agent " + std::to_string(agent) + " has no true position"),
        agent(agent) {}

  int agent;
};

/// Reference trajectory parameters that violate the scenario's requirements.
class InvalidScenario : public SimError {
 public:
  using SimError::SimError;
};

/// Unparseable or semantically invalid configuration input.
class ConfigError : public SimError {
 public:
  using SimError::SimError;
};

}  // namespace bearing_swarm
