#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace crowdsweep {

using Vec2 = Eigen::Vector2d;

/// Flat configuration vector; agent i occupies entries (2i, 2i+1).
using Configuration = Eigen::VectorXd;

struct Agent {
  double radius = 0.0;   // m
  double speed = 0.0;    // m/s, the uncontrolled desired speed s_i
  Vec2 target = Vec2::Zero();
};

struct Obstacle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;   // m
};

/// Static problem data: disk agents, disk obstacles, horizon, start state.
struct Scenario {
  std::vector<Agent> agents;
  std::vector<Obstacle> obstacles;
  double horizon = 0.0;  // s
  Configuration x0;

  int agent_count() const { return static_cast<int>(agents.size()); }
  int obstacle_count() const { return static_cast<int>(obstacles.size()); }
  int dim() const { return 2 * agent_count(); }
};

enum class PairKind { AgentAgent, AgentObstacle };

/// Label of one non-penetration constraint, plus the signed distance at
/// which it was observed. Agent-agent pairs are stored once with i < j.
struct ContactPair {
  PairKind kind = PairKind::AgentAgent;
  int i = 0;
  int j = 0;
  double value = 0.0;  // signed distance, m
};

inline bool same_label(const ContactPair& a, const ContactPair& b) {
  return a.kind == b.kind && a.i == b.i && a.j == b.j;
}

/// Deterministic label order: agent-agent by (i, j), then agent-obstacle by (i, j).
inline bool label_less(const ContactPair& a, const ContactPair& b) {
  if (a.kind != b.kind) return a.kind == PairKind::AgentAgent;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

inline std::string label_string(const ContactPair& p) {
  const char* tag = p.kind == PairKind::AgentAgent ? "agents" : "obstacle";
  return std::string(tag) + "(" + std::to_string(p.i) + "," + std::to_string(p.j) + ")";
}

// Error taxonomy. Geometry outside the model's domain is a hard error,
// never silently regularized.
struct DegenerateGeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceFailure : std::runtime_error {
  double best_residual;
  ConvergenceFailure(const std::string& what, double residual)
      : std::runtime_error(what), best_residual(residual) {}
};

struct InvalidStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace crowdsweep
