#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "crowdsweep/cones.hpp"
#include "crowdsweep/geometry.hpp"
#include "crowdsweep/types.hpp"

namespace crowdsweep {

/// Feasibility tolerance for simulated states.
inline constexpr double kTolFeas = 1e-7;

/// Desired-velocity singularity band around the target.
inline constexpr double kEpsTarget = 1e-9;

/// Piecewise-constant per-agent controls on a uniform grid.
struct ControlSignal {
  double h = 0.0;               // s
  Eigen::MatrixXd values;       // steps x agents

  int steps() const { return static_cast<int>(values.rows()); }

  static ControlSignal constant(double a, double h, double horizon, int agents);
};

enum class Scheme { VelocityProjection, PositionProjection };
enum class TieBreak { Left, Right };

struct Trajectory {
  double h = 0.0;
  Eigen::VectorXd times;               // K+1
  std::vector<Configuration> states;   // K+1
  std::vector<Configuration> velocities;  // K, velocity_k = (x_{k+1}-x_k)/h
  std::vector<ContactPair> pairs;      // canonical label order
  Eigen::MatrixXd multipliers;         // K x pairs, eta >= 0

  int step_count() const { return static_cast<int>(velocities.size()); }
  int node_count() const { return static_cast<int>(states.size()); }
};

struct ContactEvent {
  ContactPair pair;
  double t_enter = 0.0;
  double t_exit = 0.0;
};

/// Block i = -a_i * s_i * unit(x_i - target_i); zero within kEpsTarget of the
/// target (the unit vector is undefined there).
Configuration desired_velocity(const Configuration& x, const Eigen::VectorXd& a,
                               const Scenario& sc);

/// Constraint activation band for one step: pairs reachable within the step
/// are constrained, which keeps every state feasible (the pair distance
/// functions are convex, so first-order feasibility is exact feasibility).
double activation_band(double h, const Configuration& U);

/// One catching-up step. Velocity projection: v = Pi(U; V(x_k)),
/// x_{k+1} = x_k + h v, eta from the projection multipliers. Position
/// projection: x_{k+1} = proj(x_k + h U), eta = corrections / h.
std::pair<Configuration, Eigen::VectorXd> step(const Configuration& x_k,
                                               const Eigen::VectorXd& a_k, double h,
                                               Scheme scheme, const Scenario& sc,
                                               TieBreak tie_break = TieBreak::Left);

/// Integrate over [0, T]; u.h must divide T to within 1e-9.
Trajectory simulate(const Scenario& sc, const ControlSignal& u,
                    Scheme scheme = Scheme::VelocityProjection,
                    TieBreak tie_break = TieBreak::Left);

/// Maximal node intervals where a pair's signed distance stays <= eps;
/// intervals separated by less than 2h are merged.
std::vector<ContactEvent> extract_contacts(const Trajectory& traj, const Scenario& sc,
                                           double eps);

/// First time the pair's signed distance crosses below eps, by linear
/// interpolation between nodes; negative if it never does.
double first_crossing_time(const Trajectory& traj, const Scenario& sc,
                           const ContactPair& pair, double eps);

/// J = ||x(T) - target||^2 / 2 + (tau/2) * sum_k h * ||a_k||^2
/// (left-endpoint rectangle rule, exact for piecewise-constant controls).
double cost_functional(const Trajectory& traj, const ControlSignal& u, double tau,
                       const Scenario& sc);

/// Wraps externally produced states into a Trajectory (chord velocities,
/// zero multipliers). Times must be a uniform grid.
Trajectory make_trajectory(const Eigen::VectorXd& times,
                           std::vector<Configuration> states, const Scenario& sc);

}  // namespace crowdsweep
