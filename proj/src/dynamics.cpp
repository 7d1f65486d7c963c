#include "crowdsweep/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowdsweep {

namespace {

constexpr double kEpsTieScale = 1e-6;

Vec2 rot90(const Vec2& v, TieBreak tb) {
  return tb == TieBreak::Left ? Vec2(-v.y(), v.x()) : Vec2(v.y(), -v.x());
}

double max_speed(const Scenario& sc) {
  double s = 0.0;
  for (const Agent& a : sc.agents) s = std::max(s, a.speed);
  return s;
}

// Blockwise +-90 degree rotation of a single contact gradient, unit norm.
Configuration tangential_nudge_dir(const Configuration& g, TieBreak tb) {
  Configuration t = Configuration::Zero(g.size());
  for (int i = 0; 2 * i + 1 < g.size(); ++i) {
    const Vec2 block = g.segment<2>(2 * i);
    if (block.squaredNorm() > 0.0) t.segment<2>(2 * i) = rot90(block, tb);
  }
  const double n = t.norm();
  return n > 0.0 ? Configuration(t / n) : t;
}

int canonical_index(const std::vector<ContactPair>& pairs, const ContactPair& label) {
  for (int k = 0; k < static_cast<int>(pairs.size()); ++k)
    if (same_label(pairs[k], label)) return k;
  return -1;
}

}  // namespace

ControlSignal ControlSignal::constant(double a, double h, double horizon, int agents) {
  if (!(h > 0.0)) throw std::invalid_argument("ControlSignal: h <= 0");
  const int steps = static_cast<int>(std::llround(horizon / h));
  if (steps < 1 || std::abs(steps * h - horizon) > 1e-9)
    throw std::invalid_argument("ControlSignal: h does not divide horizon");
  ControlSignal u;
  u.h = h;
  u.values = Eigen::MatrixXd::Constant(steps, agents, a);
  return u;
}

Configuration desired_velocity(const Configuration& x, const Eigen::VectorXd& a,
                               const Scenario& sc) {
  if (a.size() != sc.agent_count())
    throw std::invalid_argument("desired_velocity: control size mismatch");
  Configuration u = Configuration::Zero(x.size());
  for (int i = 0; i < sc.agent_count(); ++i) {
    const Vec2 xi = x.segment<2>(2 * i);
    const Vec2 d = xi - sc.agents[i].target;
    const double dist = d.norm();
    if (dist < kEpsTarget) continue;
    u.segment<2>(2 * i) = -a[i] * sc.agents[i].speed * (d / dist);
  }
  return u;
}

double activation_band(double h, const Configuration& U) {
  // One-step reach bound: ||Pi(U)|| <= ||U||, pairwise approach < 2||U||.
  return kEpsActive + 2.0 * h * U.norm();
}

std::pair<Configuration, Eigen::VectorXd> step(const Configuration& x_k,
                                               const Eigen::VectorXd& a_k, double h,
                                               Scheme scheme, const Scenario& sc,
                                               TieBreak tie_break) {
  if (!(h > 0.0)) throw std::invalid_argument("step: h <= 0");
  if (min_signed_distance(x_k, sc) < -kTolFeas)
    throw InvalidStateError("step: infeasible state (penetration beyond tolerance)");

  const std::vector<ContactPair> pairs = all_pairs(sc);
  const int np = static_cast<int>(pairs.size());
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(np);

  const Configuration U = desired_velocity(x_k, a_k, sc);
  const double band = activation_band(h, U);
  const double eps_tie = kEpsTieScale * max_speed(sc);
  const double stall_tol = 1e-9 * std::max(1.0, U.norm());

  if (scheme == Scheme::VelocityProjection) {
    const VelocityCone cone = build_admissible_cone(x_k, sc, band);
    ProjectionResult res = project_velocity(U, cone);
    Configuration v = res.v;
    if (cone.size() == 1 && U.norm() > 0.0 && v.norm() <= stall_tol) {
      // Symmetric stagnation: desired velocity cancelled by the single
      // contact normal. Deterministic tangential escape.
      v += eps_tie * tangential_nudge_dir(cone.constraints[0].gradient, tie_break);
    }
    for (int k = 0; k < cone.size(); ++k) {
      const int ci = canonical_index(pairs, cone.constraints[k].label);
      if (ci >= 0) eta[ci] = res.eta[k];
    }
    return {x_k + h * v, eta};
  }

  const Configuration y = x_k + h * U;
  ConfigProjectionResult pr = project_configuration(y, sc);
  Configuration x_next = pr.x;
  eta = pr.corrections / h;
  int positive = 0, which = -1;
  for (int k = 0; k < np; ++k)
    if (eta[k] > 0.0) {
      ++positive;
      which = k;
    }
  if (positive == 1 && U.norm() > 0.0 && (x_next - x_k).norm() / h <= stall_tol) {
    const ContactPair& p = pairs[which];
    const Configuration g = p.kind == PairKind::AgentAgent
                                ? pair_gradient(x_k, p.i, p.j)
                                : obstacle_gradient(x_k, p.i, p.j, sc);
    x_next += h * eps_tie * tangential_nudge_dir(g, tie_break);
  }
  return {x_next, eta};
}

Trajectory simulate(const Scenario& sc, const ControlSignal& u, Scheme scheme,
                    TieBreak tie_break) {
  if (!(u.h > 0.0)) throw std::invalid_argument("simulate: h <= 0");
  if (u.values.cols() != sc.agent_count())
    throw std::invalid_argument("simulate: control agent count mismatch");
  const int steps = static_cast<int>(std::llround(sc.horizon / u.h));
  if (steps != u.steps() || std::abs(steps * u.h - sc.horizon) > 1e-9)
    throw std::invalid_argument("simulate: control grid does not cover the horizon");
  if (!u.values.allFinite()) throw std::invalid_argument("simulate: control not finite");

  Trajectory traj;
  traj.h = u.h;
  traj.pairs = all_pairs(sc);
  traj.times = Eigen::VectorXd::LinSpaced(steps + 1, 0.0, sc.horizon);
  traj.states.reserve(steps + 1);
  traj.states.push_back(sc.x0);
  traj.velocities.reserve(steps);
  traj.multipliers = Eigen::MatrixXd::Zero(steps, static_cast<int>(traj.pairs.size()));

  for (int k = 0; k < steps; ++k) {
    try {
      auto [x_next, eta] = step(traj.states.back(), u.values.row(k).transpose(), u.h,
                                scheme, sc, tie_break);
      traj.velocities.push_back((x_next - traj.states.back()) / u.h);
      traj.multipliers.row(k) = eta.transpose();
      traj.states.push_back(std::move(x_next));
    } catch (const ConvergenceFailure& e) {
      throw ConvergenceFailure("simulate: t = " + std::to_string(k * u.h) + ": " + e.what(),
                               e.best_residual);
    } catch (const InvalidStateError& e) {
      throw InvalidStateError("simulate: t = " + std::to_string(k * u.h) + ": " + e.what());
    }
  }
  return traj;
}

std::vector<ContactEvent> extract_contacts(const Trajectory& traj, const Scenario& sc,
                                           double eps) {
  if (eps < 0.0) throw std::invalid_argument("extract_contacts: eps < 0");
  std::vector<ContactEvent> events;
  const int nodes = traj.node_count();
  const double T = traj.times[nodes - 1];
  for (const ContactPair& p : traj.pairs) {
    std::vector<std::pair<int, int>> runs;
    int start = -1;
    for (int k = 0; k < nodes; ++k) {
      const double d = p.kind == PairKind::AgentAgent
                           ? signed_distance_agents(traj.states[k], p.i, p.j, sc)
                           : signed_distance_obstacle(traj.states[k], p.i, p.j, sc);
      const bool in = d <= eps;
      if (in && start < 0) start = k;
      if (!in && start >= 0) {
        runs.emplace_back(start, k - 1);
        start = -1;
      }
    }
    if (start >= 0) runs.emplace_back(start, nodes - 1);

    std::vector<std::pair<double, double>> ivs;
    for (auto [a, b] : runs) {
      double t0 = traj.times[a], t1 = traj.times[b];
      if (a == b) {  // widen single-node contacts to node resolution
        t1 = std::min(t1 + traj.h, T);
        if (t1 == t0) t0 = std::max(0.0, t0 - traj.h);
      }
      if (!ivs.empty() && t0 - ivs.back().second < 2.0 * traj.h)
        ivs.back().second = t1;
      else
        ivs.emplace_back(t0, t1);
    }
    for (auto [t0, t1] : ivs)
      if (t0 < t1) events.push_back({p, t0, t1});
  }
  return events;
}

double first_crossing_time(const Trajectory& traj, const Scenario& sc,
                           const ContactPair& pair, double eps) {
  auto dist = [&](int k) {
    return pair.kind == PairKind::AgentAgent
               ? signed_distance_agents(traj.states[k], pair.i, pair.j, sc)
               : signed_distance_obstacle(traj.states[k], pair.i, pair.j, sc);
  };
  double prev = dist(0);
  if (prev <= eps) return traj.times[0];
  for (int k = 1; k < traj.node_count(); ++k) {
    const double cur = dist(k);
    if (cur <= eps)
      return traj.times[k - 1] + traj.h * (prev - eps) / (prev - cur);
    prev = cur;
  }
  return -1.0;
}

double cost_functional(const Trajectory& traj, const ControlSignal& u, double tau,
                       const Scenario& sc) {
  if (tau < 0.0) throw std::invalid_argument("cost_functional: tau < 0");
  if (u.steps() != traj.step_count() || std::abs(u.h - traj.h) > 1e-12)
    throw std::invalid_argument("cost_functional: control and trajectory grids differ");
  const Configuration& xT = traj.states.back();
  double terminal = 0.0;
  for (int i = 0; i < sc.agent_count(); ++i)
    terminal += (xT.segment<2>(2 * i) - sc.agents[i].target).squaredNorm();
  return 0.5 * terminal + 0.5 * tau * u.h * u.values.squaredNorm();
}

Trajectory make_trajectory(const Eigen::VectorXd& times, std::vector<Configuration> states,
                           const Scenario& sc) {
  const int nodes = static_cast<int>(times.size());
  if (nodes < 2 || static_cast<int>(states.size()) != nodes)
    throw std::invalid_argument("make_trajectory: need >= 2 nodes and matching states");
  const double h = times[1] - times[0];
  for (int k = 1; k < nodes; ++k)
    if (std::abs(times[k] - times[k - 1] - h) > 1e-9)
      throw std::invalid_argument("make_trajectory: grid not uniform");
  Trajectory traj;
  traj.h = h;
  traj.times = times;
  traj.pairs = all_pairs(sc);
  traj.velocities.reserve(nodes - 1);
  for (int k = 0; k + 1 < nodes; ++k)
    traj.velocities.push_back((states[k + 1] - states[k]) / h);
  traj.states = std::move(states);
  traj.multipliers =
      Eigen::MatrixXd::Zero(nodes - 1, static_cast<int>(traj.pairs.size()));
  return traj;
}

}  // namespace crowdsweep
