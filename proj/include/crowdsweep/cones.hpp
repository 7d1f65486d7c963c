#pragma once

#include <Eigen/Dense>

#include "crowdsweep/geometry.hpp"
#include "crowdsweep/types.hpp"

namespace crowdsweep {

/// Polyhedral cone {v : <g_k, v> >= 0 for all k}, one row per active contact.
struct VelocityCone {
  struct Constraint {
    ContactPair label;
    Configuration gradient;
  };
  std::vector<Constraint> constraints;

  int size() const { return static_cast<int>(constraints.size()); }
  bool empty() const { return constraints.empty(); }
};

/// Euclidean projection onto a VelocityCone together with the exact
/// multipliers realizing it: v = U + sum_k eta_k g_k, eta_k >= 0,
/// <g_k, v> >= 0, eta_k <g_k, v> = 0 (all up to kkt_residual).
struct ProjectionResult {
  Eigen::VectorXd v;
  Eigen::VectorXd eta;     // aligned with cone.constraints
  double kkt_residual = 0.0;
};

/// Result of the local projection of a configuration onto the feasible set.
/// Corrections are the nonnegative per-constraint multiples of the contact
/// gradients accumulated by the sweep (displacement = sum c_k * g_k).
struct ConfigProjectionResult {
  Configuration x;
  std::vector<ContactPair> labels;
  Eigen::VectorXd corrections;  // aligned with labels
  int sweeps = 0;
};

/// One constraint per pair active at x within eps_active.
VelocityCone build_admissible_cone(const Configuration& x, const Scenario& sc,
                                   double eps_active = kEpsActive);

/// Exact projection of U onto the cone via a dense active-set solve of the
/// dual nonnegative least-squares problem min_{eta>=0} ||U + G^T eta||^2.
/// Deterministic: pivots resolve ties by smallest constraint index, so
/// multipliers of linearly dependent gradients depend on the label order.
ProjectionResult project_velocity(const Eigen::VectorXd& U, const VelocityCone& cone);

/// Local projection of y onto the feasible set by cyclic radial corrections
/// (Gauss-Seidel over violated pairs). The feasible set is nonconvex, so the
/// result is a nearby feasible point, not a global projection.
ConfigProjectionResult project_configuration(const Configuration& y, const Scenario& sc,
                                             double tol = 1e-10, int max_iter = -1);

}  // namespace crowdsweep
