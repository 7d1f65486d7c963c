#include "crowdsweep/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowdsweep {

namespace {

double node_control(const ControlSignal& u, int node, int agent) {
  const int k = std::min(node, u.steps() - 1);
  return u.values(k, agent);
}

double control_sup(const ControlSignal& u) {
  return u.values.size() == 0 ? 0.0 : u.values.cwiseAbs().maxCoeff();
}

double scenario_max_speed(const Scenario& sc) {
  double s = 0.0;
  for (const Agent& a : sc.agents) s = std::max(s, a.speed);
  return s;
}

double pair_distance(const Configuration& x, const ContactPair& p, const Scenario& sc) {
  return p.kind == PairKind::AgentAgent ? signed_distance_agents(x, p.i, p.j, sc)
                                        : signed_distance_obstacle(x, p.i, p.j, sc);
}

void check_eta_grid(const Trajectory& traj, const Eigen::MatrixXd& eta) {
  if (eta.rows() != traj.node_count() ||
      eta.cols() != static_cast<int>(traj.pairs.size()))
    throw std::invalid_argument("eta grid does not match the trajectory grid");
}

void check_q_grid(const Trajectory& traj, const Eigen::MatrixXd& q,
                  const Scenario& sc) {
  if (q.rows() != traj.node_count() || q.cols() != sc.dim())
    throw std::invalid_argument("adjoint grid does not match the trajectory grid");
}

ConditionResidual make_entry(const std::string& name, double residual, double time,
                             int index, double tol) {
  return {name, residual, time, index, tol, residual <= tol};
}

}  // namespace

Eigen::VectorXd recover_eta(const Trajectory& traj, const ControlSignal& u,
                            const Scenario& sc, double eps_active) {
  if (sc.agent_count() != 1 || sc.obstacle_count() != 1)
    throw UnsupportedConfigurationError(
        "recover_eta: requires exactly one agent and one obstacle");
  if (sc.agents[0].target.norm() > 1e-12)
    throw UnsupportedConfigurationError(
        "recover_eta: the closed-form multiplier assumes the target at the origin");
  const int nodes = traj.node_count();
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(nodes);
  const Vec2 c = sc.obstacles[0].center;
  for (int k = 0; k < nodes; ++k) {
    const double d = signed_distance_obstacle(traj.states[k], 0, 0, sc);
    if (d > eps_active) continue;
    const Vec2 x = traj.states[k].segment<2>(0);
    const double xn = x.norm();
    const double rn = (x - c).norm();
    if (xn < kEpsTarget || rn == 0.0) continue;
    // Negative values only occur past the tangent point, where the contact
    // is releasing and the true multiplier is zero.
    eta[k] = std::max(0.0, 0.5 * node_control(u, k, 0) * x.dot(x - c) / (xn * rn));
  }
  return eta;
}

ResidualReport check_complementarity(const Trajectory& traj, const Eigen::MatrixXd& eta,
                                     const Scenario& sc, double eps, double eps_active) {
  check_eta_grid(traj, eta);
  ConditionResidual worst = make_entry("complementarity", 0.0, 0.0, 0, eps);
  for (int k = 0; k < traj.node_count(); ++k) {
    for (int p = 0; p < eta.cols(); ++p) {
      if (pair_distance(traj.states[k], traj.pairs[p], sc) <= eps_active) continue;
      const double r = std::abs(eta(k, p));
      if (r > worst.residual) {
        worst.residual = r;
        worst.time = traj.times[k];
        worst.index = k;
      }
    }
  }
  worst.pass = worst.residual <= eps;
  return {{worst}};
}

ResidualReport check_orthogonality(const Eigen::MatrixXd& q_x, const Trajectory& traj,
                                   const Eigen::MatrixXd& eta, const Scenario& sc,
                                   double eps) {
  check_eta_grid(traj, eta);
  check_q_grid(traj, q_x, sc);
  ConditionResidual worst = make_entry("orthogonality", 0.0, 0.0, 0, eps);
  for (int k = 0; k < traj.node_count(); ++k) {
    for (int p = 0; p < eta.cols(); ++p) {
      if (eta(k, p) <= eps) continue;
      const ContactPair& pair = traj.pairs[p];
      double r = 0.0;
      if (pair.kind == PairKind::AgentObstacle) {
        const Vec2 q = q_x.row(k).segment<2>(2 * pair.i);
        const Vec2 x = traj.states[k].segment<2>(2 * pair.i);
        r = std::abs(q.dot(sc.obstacles[pair.j].center - x)) / (1.0 + q.norm());
      } else {
        const Vec2 dq = q_x.row(k).segment<2>(2 * pair.j) -
                        q_x.row(k).segment<2>(2 * pair.i);
        const Vec2 dx = traj.states[k].segment<2>(2 * pair.j) -
                        traj.states[k].segment<2>(2 * pair.i);
        r = std::abs(dq.dot(dx)) / (1.0 + dq.norm());
      }
      if (r > worst.residual) {
        worst.residual = r;
        worst.time = traj.times[k];
        worst.index = k;
      }
    }
  }
  worst.pass = worst.residual <= eps;
  return {{worst}};
}

ResidualReport check_dynamics(const Trajectory& traj, const ControlSignal& u,
                              const Eigen::MatrixXd& eta, const Scenario& sc, double eps,
                              double eps_active) {
  check_eta_grid(traj, eta);
  if (u.steps() != traj.step_count())
    throw std::invalid_argument("check_dynamics: control grid mismatch");
  const int nodes = traj.node_count();
  const int np = static_cast<int>(traj.pairs.size());
  const double tol = eps * (1.0 + scenario_max_speed(sc) * control_sup(u));
  ConditionResidual worst = make_entry("dynamics", 0.0, 0.0, 0, tol);

  for (int k = 0; k < nodes; ++k) {
    const Configuration& x = traj.states[k];

    // Model right-hand side at this node.
    Configuration rhs = Configuration::Zero(sc.dim());
    for (int i = 0; i < sc.agent_count(); ++i) {
      const Vec2 xi = x.segment<2>(2 * i);
      const Vec2 d = xi - sc.agents[i].target;
      if (d.norm() >= kEpsTarget)
        rhs.segment<2>(2 * i) = -node_control(u, k, i) * sc.agents[i].speed * d.normalized();
    }
    std::vector<bool> active(np, false);
    for (int p = 0; p < np; ++p) {
      active[p] = pair_distance(x, traj.pairs[p], sc) <= eps_active;
      if (eta(k, p) == 0.0) continue;
      const ContactPair& pair = traj.pairs[p];
      if (pair.kind == PairKind::AgentAgent) {
        rhs += eta(k, p) * pair_gradient(x, pair.i, pair.j);
      } else {
        rhs += 2.0 * sc.agents[pair.i].speed * eta(k, p) *
               obstacle_gradient(x, pair.i, pair.j, sc);
      }
    }

    // Difference quotients: best of central/forward/backward, so isolated
    // kink nodes of a trajectory that satisfies the balance a.e. pass.
    std::vector<Configuration> stencils;
    if (k > 0 && k + 1 < nodes)
      stencils.push_back((traj.states[k + 1] - traj.states[k - 1]) / (2.0 * traj.h));
    if (k + 1 < nodes) stencils.push_back((traj.states[k + 1] - x) / traj.h);
    if (k > 0) stencils.push_back((x - traj.states[k - 1]) / traj.h);

    double node_r = std::numeric_limits<double>::infinity();
    for (const Configuration& xdot : stencils) {
      const Configuration resid = xdot - rhs;
      double r = 0.0;
      for (int i = 0; i < sc.agent_count(); ++i) {
        bool touched = false;
        for (int p = 0; p < np; ++p) {
          if (!active[p]) continue;
          const ContactPair& pair = traj.pairs[p];
          if (pair.kind == PairKind::AgentObstacle && pair.i == i) {
            const Vec2 n = unit_direction(x.segment<2>(2 * i).eval(),
                                          sc.obstacles[pair.j].center);
            r = std::max(r, std::abs(n.dot(resid.segment<2>(2 * i))));
            touched = true;
          } else if (pair.kind == PairKind::AgentAgent && (pair.i == i || pair.j == i)) {
            const Vec2 e = unit_direction(x.segment<2>(2 * pair.j).eval(),
                                          x.segment<2>(2 * pair.i).eval());
            r = std::max(r, std::abs(e.dot(resid.segment<2>(2 * i))));
            touched = true;
          }
        }
        if (!touched) r = std::max(r, resid.segment<2>(2 * i).norm());
      }
      node_r = std::min(node_r, r);
    }
    if (node_r > worst.residual) {
      worst.residual = node_r;
      worst.time = traj.times[k];
      worst.index = k;
    }
  }
  worst.pass = worst.residual <= tol;
  return {{worst}};
}

ResidualReport check_adjoint(double lambda, const ControlSignal& u,
                             const Eigen::MatrixXd& q_x, const Trajectory& traj,
                             const Scenario& sc, double eps, const Eigen::MatrixXd* q_a,
                             const Eigen::MatrixXd* p_a) {
  check_q_grid(traj, q_x, sc);
  if (u.steps() != traj.step_count())
    throw std::invalid_argument("check_adjoint: control grid mismatch");
  const double tol = eps * (1.0 + lambda * control_sup(u));
  ConditionResidual worst = make_entry("control-relation", 0.0, 0.0, 0, tol);
  for (int k = 0; k < traj.node_count(); ++k) {
    for (int i = 0; i < sc.agent_count(); ++i) {
      const Vec2 xi = traj.states[k].segment<2>(2 * i);
      const Vec2 d = xi - sc.agents[i].target;
      double rhs = 0.0;
      if (d.norm() >= kEpsTarget) {
        const Vec2 q = q_x.row(k).segment<2>(2 * i);
        rhs = sc.agents[i].speed * q.dot(d.normalized());
      }
      const double r = std::abs(lambda * node_control(u, k, i) - rhs);
      if (r > worst.residual) {
        worst.residual = r;
        worst.time = traj.times[k];
        worst.index = k;
      }
    }
  }
  worst.pass = worst.residual <= tol;
  ResidualReport report{{worst}};

  if (q_a || p_a) {
    ConditionResidual zero = make_entry("control-adjoint-zero", 0.0, 0.0, 0, eps);
    for (const Eigen::MatrixXd* m : {q_a, p_a}) {
      if (!m || m->size() == 0) continue;
      Eigen::Index row, col;
      const double v = m->cwiseAbs().maxCoeff(&row, &col);
      if (v > zero.residual) {
        zero.residual = v;
        zero.index = static_cast<int>(row);
        zero.time = traj.times[static_cast<int>(row)];
      }
    }
    zero.pass = zero.residual <= eps;
    report.entries.push_back(zero);
  }
  return report;
}

ResidualReport check_transversality(const Eigen::VectorXd& p_T, double lambda,
                                    const Configuration& x_T,
                                    const Eigen::VectorXd& eta_T, const Scenario& sc,
                                    double eps, const Eigen::VectorXd* p_a_T) {
  const std::vector<ContactPair> pairs = all_pairs(sc);
  if (eta_T.size() != static_cast<int>(pairs.size()))
    throw std::invalid_argument("check_transversality: eta_T size mismatch");
  if (p_T.size() != sc.dim() || x_T.size() != sc.dim())
    throw std::invalid_argument("check_transversality: terminal vector size mismatch");

  Configuration rhs = Configuration::Zero(sc.dim());
  for (int p = 0; p < eta_T.size(); ++p) {
    if (eta_T[p] == 0.0) continue;
    const ContactPair& pair = pairs[p];
    if (pair.kind == PairKind::AgentAgent)
      rhs += eta_T[p] * pair_gradient(x_T, pair.i, pair.j);
    else
      rhs += 2.0 * sc.agents[pair.i].speed * eta_T[p] *
             obstacle_gradient(x_T, pair.i, pair.j, sc);
  }
  Configuration lhs = p_T;
  for (int i = 0; i < sc.agent_count(); ++i)
    lhs.segment<2>(2 * i) += lambda * (x_T.segment<2>(2 * i) - sc.agents[i].target);

  ResidualReport report;
  report.entries.push_back(
      make_entry("terminal-adjoint", (lhs - rhs).norm(), 0.0, -1, eps));
  if (p_a_T && p_a_T->size() > 0)
    report.entries.push_back(make_entry("terminal-control-adjoint",
                                        p_a_T->cwiseAbs().maxCoeff(), 0.0, -1, eps));
  // Condition (10) is scale-free strict positivity; a fixed tiny floor keeps
  // it independent of the dual normalization.
  const double nontrivial = lambda + p_T.norm();
  report.entries.push_back(
      make_entry("nontriviality", std::max(0.0, 1e-12 - nontrivial), 0.0, -1, 0.0));
  return report;
}

double max_gamma_variation_off_contact(const Eigen::MatrixXd& q_x,
                                       const Eigen::MatrixXd& p_x,
                                       const Trajectory& traj, const Scenario& sc,
                                       double eps_active) {
  check_q_grid(traj, q_x, sc);
  check_q_grid(traj, p_x, sc);
  const Eigen::MatrixXd gamma = q_x - p_x;
  double worst = 0.0;
  for (int k = 0; k + 1 < traj.node_count(); ++k) {
    const bool free_k = min_signed_distance(traj.states[k], sc) > eps_active;
    const bool free_k1 = min_signed_distance(traj.states[k + 1], sc) > eps_active;
    if (free_k && free_k1)
      worst = std::max(worst, (gamma.row(k + 1) - gamma.row(k)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace crowdsweep
