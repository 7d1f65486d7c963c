#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "crowdsweep/types.hpp"

namespace crowdsweep {

/// Phase-time bookkeeping mode for the closed-form model.
///  - Paper:     first-contact time spends the full center-to-center distance
///               at speed s*a (t1 = d0/(s*a)).
///  - Geometric: first contact when the gap closes (t1 = (d0 - rho)/(s*a)).
/// The arc is traversed at speed a in both modes.
enum class PhaseMode { Paper, Geometric };

enum class Side { Left, Right };

/// Closed-form model data: one agent, one static disk obstacle, one target.
/// rho = R_agent + R_obstacle is the contact radius (2R for equal disks).
struct ObstacleRunParams {
  Vec2 x0 = Vec2::Zero();
  Vec2 x_obs = Vec2::Zero();
  Vec2 x_tar = Vec2::Zero();
  double contact_radius = 0.0;  // rho, m
  double speed = 0.0;           // s, m/s
  double horizon = 0.0;         // T, s
  double tau = 0.0;
  PhaseMode mode = PhaseMode::Paper;
  Side side = Side::Left;
};

struct ObstacleRunResult {
  double a_bar = 0.0;        // optimal constant control
  double t1 = 0.0;           // first contact time, s
  double theta1 = 0.0;       // release time, s
  double theta_deg = 0.0;    // contact angle swept on the circle
  double arc_len = 0.0;      // m
  Vec2 x_release = Vec2::Zero();
  double terminal_dist = 0.0;  // distance to target at T, m
  double J = 0.0;
};

struct SweepRow {
  double tau, a_bar, t1, theta1, J;
};

struct PathSample {
  double t;
  Vec2 position;
  Vec2 velocity;
};

/// The two points p on the circle ||p - x_obs|| = rho whose line of sight to
/// x_tar is tangent: <p - x_tar, p - x_obs> = 0. Ordered (left, right) by the
/// sign of the cross product of (x_obs - x_tar) with (p - x_obs).
std::pair<Vec2, Vec2> tangent_points(const Vec2& x_obs, double rho, const Vec2& x_tar);

/// Angle in degrees between the entry contact direction and the release
/// direction (p_release - x_obs), in [0, 180].
double contact_angle(const Vec2& entry_dir, const Vec2& p_release, const Vec2& x_obs);

/// pi * rho * theta_deg / 180.
double arc_length(double theta_deg, double rho);

/// (t1, theta1) for a constant control a_bar > 0; theta1 = t1 + arc/a_bar.
std::pair<double, double> phase_times(double a_bar, const ObstacleRunParams& p);

/// max(0, L_tan + (theta1 - T) * s * a_bar) with L_tan the tangent length
/// from the target to the contact circle. Clamped: the agent stops at the
/// target if it would arrive early.
double terminal_distance(double a_bar, const ObstacleRunParams& p);

/// J(a_bar) = terminal_distance^2 / 2 + (tau/2) * a_bar^2 * T.
double cost_closed_form(double a_bar, const ObstacleRunParams& p);

/// Minimizes cost_closed_form over a_bar > 0. The unclamped stationary point
/// a* = s*A/(s^2 T + tau) is cross-checked against a golden-section search.
ObstacleRunResult optimize_constant_control(const ObstacleRunParams& p);

/// One optimize_constant_control row per tau, in input order.
std::vector<SweepRow> sweep_table(const std::vector<double>& tau_list,
                                  ObstacleRunParams p);

/// Position/velocity of the three-phase path at time t: straight descent to
/// the entry contact point over [0, t1], circular arc at speed a_bar to the
/// release tangent point over [t1, theta1], then straight toward the target
/// at speed s*a_bar, stopping there if reached before T.
PathSample piecewise_state(double t, double a_bar, const ObstacleRunParams& p);

/// The path sampled on a uniform grid with n_samples+1 nodes over [0, T].
std::vector<PathSample> piecewise_trajectory(double a_bar, const ObstacleRunParams& p,
                                             int n_samples = 600);

}  // namespace crowdsweep
