#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "crowdsweep/dynamics.hpp"
#include "crowdsweep/types.hpp"

namespace crowdsweep {

/// Dual data accompanying a candidate trajectory, on the trajectory grid.
/// gamma is never stored; it is recoverable as q_x - p_x and only its
/// constancy away from contacts is checkable.
struct DualArc {
  double lambda = 0.0;          // >= 0
  Eigen::MatrixXd q_x;          // nodes x 2N
  Eigen::MatrixXd p_x;          // nodes x 2N
  Eigen::MatrixXd q_a;          // nodes x N
  Eigen::MatrixXd p_a;          // nodes x N
  Eigen::MatrixXd eta;          // nodes x pairs, >= 0
  Eigen::VectorXd p_terminal;   // 2N

  Eigen::MatrixXd gamma_tail() const { return q_x - p_x; }
};

struct ConditionResidual {
  std::string condition;
  double residual = 0.0;
  double time = 0.0;      // where the max residual is attained
  int index = -1;
  double tolerance = 0.0;
  bool pass = false;
};

struct ResidualReport {
  std::vector<ConditionResidual> entries;

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

/// Contact-multiplier recovery for the single-agent, single-obstacle model
/// with the target at the origin:
///   eta(t) = (a(t)/2) <x/||x||, (x - x_obs)/||x - x_obs||>
/// on nodes where the pair is active, zero elsewhere. Throws
/// UnsupportedConfigurationError for any other scenario layout.
Eigen::VectorXd recover_eta(const Trajectory& traj, const ControlSignal& u,
                            const Scenario& sc, double eps_active = kEpsActive);

/// eta must vanish where the pair is separated: residual is the largest
/// |eta| at nodes with signed distance > eps_active.
ResidualReport check_complementarity(const Trajectory& traj, const Eigen::MatrixXd& eta,
                                     const Scenario& sc, double eps,
                                     double eps_active = kEpsActive);

/// Where eta > eps, the adjoint arc q must be orthogonal to the contact
/// direction (normalized by 1 + ||q||).
ResidualReport check_orthogonality(const Eigen::MatrixXd& q_x, const Trajectory& traj,
                                   const Eigen::MatrixXd& eta, const Scenario& sc,
                                   double eps);

/// Velocity balance xdot = U(x, a) + sum eta * reaction. The obstacle
/// reaction is 2 s_i eta G (the scaling under which the recovered multiplier
/// solves the on-circle normal balance); agent-agent reactions use G as is.
/// At contact nodes only the normal component is checked (the tangential
/// part of a sliding arc is not determined by the multiplier identities);
/// derivatives take the best of the central/forward/backward quotients so
/// kink nodes of piecewise trajectories are not misflagged.
/// Pass tolerance: eps * (1 + s_max * ||a||_inf).
ResidualReport check_dynamics(const Trajectory& traj, const ControlSignal& u,
                              const Eigen::MatrixXd& eta, const Scenario& sc, double eps,
                              double eps_active = kEpsActive);

/// Control relation lambda a_i = s_i <q_i, d(x_i, target_i)> at every node,
/// tolerance eps * (1 + lambda * ||a||_inf); optionally checks q_a = p_a = 0.
ResidualReport check_adjoint(double lambda, const ControlSignal& u,
                             const Eigen::MatrixXd& q_x, const Trajectory& traj,
                             const Scenario& sc, double eps,
                             const Eigen::MatrixXd* q_a = nullptr,
                             const Eigen::MatrixXd* p_a = nullptr);

/// Terminal conditions: p_T + lambda (x_T - target) equals the terminal
/// contact reaction; p_a(T) = 0 when supplied; nontriviality
/// lambda + ||p_T|| > 0 (checked against a fixed 1e-12 floor - the dual is
/// a cone, so the condition is scale-free).
ResidualReport check_transversality(const Eigen::VectorXd& p_T, double lambda,
                                    const Configuration& x_T,
                                    const Eigen::VectorXd& eta_T, const Scenario& sc,
                                    double eps,
                                    const Eigen::VectorXd* p_a_T = nullptr);

/// Largest variation of gamma_tail = q_x - p_x inside contact-free node runs
/// (the jump measure may only act while contacts are active).
double max_gamma_variation_off_contact(const Eigen::MatrixXd& q_x,
                                       const Eigen::MatrixXd& p_x,
                                       const Trajectory& traj, const Scenario& sc,
                                       double eps_active = kEpsActive);

}  // namespace crowdsweep
