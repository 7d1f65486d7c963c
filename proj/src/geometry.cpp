#include "crowdsweep/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowdsweep {

namespace {

void check_agent_index(int i, const Scenario& sc, const char* who) {
  if (i < 0 || i >= sc.agent_count())
    throw std::invalid_argument(std::string(who) + ": agent index " + std::to_string(i) +
                                " out of range");
}

void check_obstacle_index(int j, const Scenario& sc, const char* who) {
  if (j < 0 || j >= sc.obstacle_count())
    throw std::invalid_argument(std::string(who) + ": obstacle index " + std::to_string(j) +
                                " out of range");
}

Vec2 agent_pos(const Configuration& x, int i) { return x.segment<2>(2 * i); }

}  // namespace

double signed_distance_agents(const Configuration& x, int i, int j, const Scenario& sc) {
  check_agent_index(i, sc, "signed_distance_agents");
  check_agent_index(j, sc, "signed_distance_agents");
  if (i == j) throw std::invalid_argument("signed_distance_agents: i == j");
  const Vec2 d = agent_pos(x, i) - agent_pos(x, j);
  return d.norm() - (sc.agents[i].radius + sc.agents[j].radius);
}

double signed_distance_obstacle(const Configuration& x, int i, int j, const Scenario& sc) {
  check_agent_index(i, sc, "signed_distance_obstacle");
  check_obstacle_index(j, sc, "signed_distance_obstacle");
  const Vec2 d = agent_pos(x, i) - sc.obstacles[j].center;
  return d.norm() - (sc.agents[i].radius + sc.obstacles[j].radius);
}

Configuration pair_gradient(const Configuration& x, int i, int j) {
  const Vec2 diff = agent_pos(x, j) - agent_pos(x, i);
  const double n = diff.norm();
  if (n == 0.0)
    throw DegenerateGeometryError("pair_gradient: coincident agent centers (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
  const Vec2 e = diff / n;
  Configuration g = Configuration::Zero(x.size());
  g.segment<2>(2 * i) = -e;
  g.segment<2>(2 * j) = e;
  return g;
}

Configuration obstacle_gradient(const Configuration& x, int i, int j, const Scenario& sc) {
  const Vec2 diff = agent_pos(x, i) - sc.obstacles[j].center;
  const double n = diff.norm();
  if (n == 0.0)
    throw DegenerateGeometryError("obstacle_gradient: agent " + std::to_string(i) +
                                  " coincides with obstacle " + std::to_string(j));
  Configuration g = Configuration::Zero(x.size());
  g.segment<2>(2 * i) = diff / n;
  return g;
}

Vec2 unit_direction(const Vec2& a, const Vec2& b) {
  const Vec2 d = a - b;
  const double n = d.norm();
  if (n == 0.0) throw DegenerateGeometryError("unit_direction: coincident points");
  return d / n;
}

std::vector<ContactPair> active_pairs(const Configuration& x, const Scenario& sc,
                                      double eps_active) {
  if (eps_active < 0.0) throw std::invalid_argument("active_pairs: eps_active < 0");
  std::vector<ContactPair> out;
  const int n = sc.agent_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = signed_distance_agents(x, i, j, sc);
      if (d <= eps_active) out.push_back({PairKind::AgentAgent, i, j, d});
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < sc.obstacle_count(); ++j) {
      const double d = signed_distance_obstacle(x, i, j, sc);
      if (d <= eps_active) out.push_back({PairKind::AgentObstacle, i, j, d});
    }
  return out;  // construction order is already the canonical label order
}

std::vector<ContactPair> all_pairs(const Scenario& sc) {
  return active_pairs(sc.x0, sc, std::numeric_limits<double>::infinity());
}

double min_signed_distance(const Configuration& x, const Scenario& sc) {
  double best = std::numeric_limits<double>::infinity();
  const int n = sc.agent_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best, signed_distance_agents(x, i, j, sc));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < sc.obstacle_count(); ++j)
      best = std::min(best, signed_distance_obstacle(x, i, j, sc));
  return best;
}

void validate_scenario(const Scenario& sc) {
  if (!(sc.horizon > 0.0)) throw ValidationError("scenario: horizon must be > 0");
  for (int i = 0; i < sc.agent_count(); ++i) {
    if (!(sc.agents[i].radius > 0.0))
      throw ValidationError("scenario: agent " + std::to_string(i) + " radius must be > 0");
    if (!(sc.agents[i].speed > 0.0))
      throw ValidationError("scenario: agent " + std::to_string(i) + " speed must be > 0");
    if (!sc.agents[i].target.allFinite())
      throw ValidationError("scenario: agent " + std::to_string(i) + " target not finite");
  }
  for (int j = 0; j < sc.obstacle_count(); ++j) {
    if (!(sc.obstacles[j].radius > 0.0))
      throw ValidationError("scenario: obstacle " + std::to_string(j) + " radius must be > 0");
    if (!sc.obstacles[j].center.allFinite())
      throw ValidationError("scenario: obstacle " + std::to_string(j) + " center not finite");
  }
  if (sc.x0.size() != sc.dim())
    throw ValidationError("scenario: x0 has size " + std::to_string(sc.x0.size()) +
                          ", expected " + std::to_string(sc.dim()));
  if (!sc.x0.allFinite()) throw ValidationError("scenario: x0 not finite");
  for (const ContactPair& p : all_pairs(sc)) {
    if (p.value < -1e-12)
      throw ValidationError("scenario: x0 infeasible, pair " + label_string(p) +
                            " has signed distance " + std::to_string(p.value));
  }
}

}  // namespace crowdsweep
