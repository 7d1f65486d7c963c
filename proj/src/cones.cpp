#include "crowdsweep/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowdsweep {

VelocityCone build_admissible_cone(const Configuration& x, const Scenario& sc,
                                   double eps_active) {
  VelocityCone cone;
  for (const ContactPair& p : active_pairs(x, sc, eps_active)) {
    Configuration g = p.kind == PairKind::AgentAgent
                          ? pair_gradient(x, p.i, p.j)
                          : obstacle_gradient(x, p.i, p.j, sc);
    cone.constraints.push_back({p, std::move(g)});
  }
  return cone;
}

namespace {

// KKT residual of the cone projection: feasibility and complementarity.
// Stationarity v = U + G^T eta holds structurally.
double kkt_residual_of(const Eigen::MatrixXd& G, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& eta) {
  const Eigen::VectorXd w = G * v;
  double r = 0.0;
  for (int k = 0; k < w.size(); ++k) {
    r = std::max(r, -w[k]);
    r = std::max(r, std::abs(eta[k] * w[k]));
  }
  return std::max(r, 0.0);
}

}  // namespace

ProjectionResult project_velocity(const Eigen::VectorXd& U, const VelocityCone& cone) {
  if (!U.allFinite()) throw std::invalid_argument("project_velocity: U not finite");
  const int m = cone.size();
  if (m == 0) return {U, Eigen::VectorXd(), 0.0};

  const int n = static_cast<int>(U.size());
  Eigen::MatrixXd G(m, n);
  for (int k = 0; k < m; ++k) {
    if (cone.constraints[k].gradient.size() != n)
      throw std::invalid_argument("project_velocity: gradient dimension mismatch");
    G.row(k) = cone.constraints[k].gradient.transpose();
  }

  const double scale = 1.0 + U.norm();
  const double tol_pick = 1e-12 * scale;
  const double tol_zero = 1e-14 * scale;

  // Lawson-Hanson active set on the dual NNLS: min_{eta>=0} ||U + G^T eta||^2.
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(m);
  std::vector<bool> in_set(m, false);
  const int budget = 10 * m + 100;

  auto solve_subproblem = [&](Eigen::VectorXd& z) {
    // Unconstrained minimizer over the current set: (G_P G_P^T) z_P = -G_P U.
    std::vector<int> idx;
    for (int k = 0; k < m; ++k)
      if (in_set[k]) idx.push_back(k);
    z = Eigen::VectorXd::Zero(m);
    if (idx.empty()) return;
    const int p = static_cast<int>(idx.size());
    Eigen::MatrixXd Gp(p, n);
    for (int r = 0; r < p; ++r) Gp.row(r) = G.row(idx[r]);
    // Min-norm solve handles linearly dependent gradients deterministically.
    const Eigen::MatrixXd GpGpT = Gp * Gp.transpose();
    const Eigen::VectorXd rhs = -(Gp * U);
    const Eigen::VectorXd zp = GpGpT.completeOrthogonalDecomposition().solve(rhs);
    for (int r = 0; r < p; ++r) z[idx[r]] = zp[r];
  };

  for (int iter = 0; iter < budget; ++iter) {
    const Eigen::VectorXd v = U + G.transpose() * eta;
    const Eigen::VectorXd w = G * v;

    int enter = -1;
    double worst = -tol_pick;
    for (int k = 0; k < m; ++k) {
      if (!in_set[k] && w[k] < worst) {  // strict < keeps smallest index on ties
        worst = w[k];
        enter = k;
      }
    }
    if (enter < 0) {
      Eigen::VectorXd eta_out = eta.cwiseMax(0.0);
      return {v, eta_out, kkt_residual_of(G, v, eta_out)};
    }
    in_set[enter] = true;

    Eigen::VectorXd z;
    for (int inner = 0; inner < budget; ++inner) {
      solve_subproblem(z);
      bool nonneg = true;
      for (int k = 0; k < m; ++k)
        if (in_set[k] && z[k] < -tol_zero) nonneg = false;
      if (nonneg) {
        eta = z.cwiseMax(0.0);
        break;
      }
      // Step toward z until the first coordinate hits zero, then drop it.
      double alpha = 1.0;
      for (int k = 0; k < m; ++k)
        if (in_set[k] && z[k] < -tol_zero)
          alpha = std::min(alpha, eta[k] / (eta[k] - z[k]));
      alpha = std::max(alpha, 0.0);
      for (int k = 0; k < m; ++k)
        if (in_set[k]) eta[k] = (1.0 - alpha) * eta[k] + alpha * z[k];
      bool dropped = false;
      for (int k = 0; k < m; ++k) {
        if (in_set[k] && k != enter && eta[k] <= tol_zero) {
          in_set[k] = false;
          eta[k] = 0.0;
          dropped = true;
        }
      }
      if (!dropped) {
        // Degenerate stall: drop the entering index to guarantee progress.
        in_set[enter] = false;
        eta[enter] = 0.0;
        break;
      }
    }
  }

  const Eigen::VectorXd v = U + G.transpose() * eta;
  const Eigen::VectorXd eta_out = eta.cwiseMax(0.0);
  const double res = kkt_residual_of(G, v, eta_out);
  if (res > 1e-8 * scale)
    throw ConvergenceFailure("project_velocity: active-set budget exhausted", res);
  return {v, eta_out, res};
}

ConfigProjectionResult project_configuration(const Configuration& y, const Scenario& sc,
                                             double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("project_configuration: tol <= 0");
  ConfigProjectionResult out;
  out.labels = all_pairs(sc);
  const int np = static_cast<int>(out.labels.size());
  out.corrections = Eigen::VectorXd::Zero(np);
  out.x = y;
  if (max_iter < 0) max_iter = 10 * np + 100;

  double worst = 0.0;
  for (int sweep = 0; sweep < std::max(max_iter, 1); ++sweep) {
    out.sweeps = sweep + 1;
    worst = 0.0;
    for (int k = 0; k < np; ++k) {
      const ContactPair& p = out.labels[k];
      if (p.kind == PairKind::AgentAgent) {
        const double d = signed_distance_agents(out.x, p.i, p.j, sc);
        if (d < -tol) {
          // Push both agents apart along the line of centers to exact contact.
          const Vec2 e = unit_direction(out.x.segment<2>(2 * p.j).eval(),
                                        out.x.segment<2>(2 * p.i).eval());
          const double c = -d / 2.0;
          out.x.segment<2>(2 * p.i) -= c * e;
          out.x.segment<2>(2 * p.j) += c * e;
          out.corrections[k] += c;
        }
      } else {
        const double d = signed_distance_obstacle(out.x, p.i, p.j, sc);
        if (d < -tol) {
          const Vec2 nhat = unit_direction(out.x.segment<2>(2 * p.i).eval(),
                                           sc.obstacles[p.j].center);
          const double c = -d;
          out.x.segment<2>(2 * p.i) += c * nhat;
          out.corrections[k] += c;
        }
      }
    }
    worst = np == 0 ? 0.0 : -std::min(0.0, min_signed_distance(out.x, sc));
    if (worst <= tol) return out;
  }
  throw ConvergenceFailure("project_configuration: not feasible after " +
                               std::to_string(max_iter) + " sweeps",
                           worst);
}

}  // namespace crowdsweep
