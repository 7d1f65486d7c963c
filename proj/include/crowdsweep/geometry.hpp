#pragma once

#include <Eigen/Dense>

#include "crowdsweep/types.hpp"

namespace crowdsweep {

/// Default activation band for contact detection. Activation uses <= so
/// exact-contact states count as active.
inline constexpr double kEpsActive = 1e-8;

/// ||x_i - x_j|| - (R_i + R_j); negative iff the disks overlap.
double signed_distance_agents(const Configuration& x, int i, int j, const Scenario& sc);

/// ||x_i - c_j|| - (R_i + r_j) against obstacle j.
double signed_distance_obstacle(const Configuration& x, int i, int j, const Scenario& sc);

/// Gradient of the agent-agent signed distance: block i = -e_ij, block j = +e_ij
/// with e_ij = (x_j - x_i)/||x_j - x_i||. Euclidean norm is sqrt(2).
Configuration pair_gradient(const Configuration& x, int i, int j);

/// Gradient of the agent-obstacle signed distance. Only block i is nonzero
/// (obstacles are not state variables); unit Euclidean norm.
Configuration obstacle_gradient(const Configuration& x, int i, int j, const Scenario& sc);

/// (a - b)/||a - b||.
Vec2 unit_direction(const Vec2& a, const Vec2& b);

/// All pairs with signed distance <= eps_active, sorted by label
/// (agent-agent by (i,j), then agent-obstacle by (i,j)).
std::vector<ContactPair> active_pairs(const Configuration& x, const Scenario& sc,
                                      double eps_active = kEpsActive);

/// Canonical ordered list of every constraint label the scenario can produce,
/// with values evaluated at x0. Fixes multiplier indexing across modules.
std::vector<ContactPair> all_pairs(const Scenario& sc);

/// Smallest signed distance over all pairs (+inf when there are none).
double min_signed_distance(const Configuration& x, const Scenario& sc);

/// Throws ValidationError naming the offending field or pair.
void validate_scenario(const Scenario& sc);

}  // namespace crowdsweep
