#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "crowdsweep/cones.hpp"
#include "test_helpers.hpp"

using namespace crowdsweep;

namespace {

VelocityCone raw_cone(const std::vector<Eigen::VectorXd>& gradients) {
  VelocityCone cone;
  int k = 0;
  for (const auto& g : gradients) {
    ContactPair label{PairKind::AgentAgent, 0, ++k, 0.0};
    cone.constraints.push_back({label, g});
  }
  return cone;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  int k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

// Independent oracle: projected-gradient descent on the dual objective
// phi(eta) = ||U + G^T eta||^2 / 2 over eta >= 0, run to a 1e-10
// projected-gradient residual. First-order and iterative, so it shares no
// machinery with the active-set solver it cross-checks.
Eigen::VectorXd oracle_project(const Eigen::VectorXd& U, const VelocityCone& cone) {
  const int m = cone.size();
  if (m == 0) return U;
  const int n = static_cast<int>(U.size());
  Eigen::MatrixXd G(m, n);
  for (int k = 0; k < m; ++k) G.row(k) = cone.constraints[k].gradient.transpose();
  const Eigen::MatrixXd GGt = G * G.transpose();
  const double lmax = GGt.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(lmax, 1e-12);

  Eigen::VectorXd eta = Eigen::VectorXd::Zero(m);
  for (int it = 0; it < 2000000; ++it) {
    const Eigen::VectorXd grad = G * (U + G.transpose() * eta);
    const Eigen::VectorXd next = (eta - step * grad).cwiseMax(0.0);
    if ((next - eta).lpNorm<Eigen::Infinity>() <= 1e-10 * step) {
      eta = next;
      break;
    }
    eta = next;
  }
  return U + G.transpose() * eta;
}

}  // namespace

TEST_CASE("empty cone projection is the identity") {
  const Eigen::VectorXd U = vec({3.0, -4.0, 1.5});
  const ProjectionResult r = project_velocity(U, VelocityCone{});
  CHECK((r.v - U).norm() == doctest::Approx(0.0));
  CHECK(r.eta.size() == 0);
  CHECK(r.kkt_residual == doctest::Approx(0.0));
}

TEST_CASE("halfspace projection with exact multiplier") {
  const auto cone = raw_cone({vec({0.0, 1.0})});
  const ProjectionResult r = project_velocity(vec({3.0, -4.0}), cone);
  CHECK(r.v[0] == doctest::Approx(3.0));
  CHECK(r.v[1] == doctest::Approx(0.0));
  REQUIRE(r.eta.size() == 1);
  CHECK(r.eta[0] == doctest::Approx(4.0));
  CHECK(r.kkt_residual <= 1e-12);
}

TEST_CASE("orthant projection") {
  const auto cone = raw_cone({vec({1.0, 0.0}), vec({0.0, 1.0})});
  const ProjectionResult r = project_velocity(vec({-1.0, -2.0}), cone);
  CHECK(r.v.norm() == doctest::Approx(0.0));
  CHECK(r.eta[0] == doctest::Approx(1.0));
  CHECK(r.eta[1] == doctest::Approx(2.0));
}

TEST_CASE("feasible input passes through with zero multipliers") {
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 5;
    std::vector<Eigen::VectorXd> gs;
    for (int k = 0; k < 1 + trial % 4; ++k) {
      Eigen::VectorXd g(n);
      for (int d = 0; d < n; ++d) g[d] = gauss(rng);
      gs.push_back(g.normalized());
    }
    // Candidate built from nonnegative gradient combinations; only a valid
    // probe when it lands inside the cone, so verify and skip otherwise.
    Eigen::VectorXd U = Eigen::VectorXd::Zero(n);
    for (const auto& g : gs) U += std::abs(gauss(rng)) * g;
    bool feasible = true;
    for (const auto& g : gs) feasible = feasible && g.dot(U) >= 0.0;
    if (!feasible) continue;
    const ProjectionResult r = project_velocity(U, raw_cone(gs));
    CHECK((r.v - U).norm() <= 1e-10 * (1.0 + U.norm()));
    if (r.eta.size() > 0) CHECK(r.eta.maxCoeff() <= 1e-10);
  }
}

TEST_CASE("random cones match the projected-gradient oracle") {
  std::mt19937 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> dim_dist(2, 8);
  std::uniform_int_distribution<int> m_dist(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = dim_dist(rng);
    const int m = m_dist(rng);
    std::vector<Eigen::VectorXd> gs;
    for (int k = 0; k < m; ++k) {
      Eigen::VectorXd g(n);
      for (int d = 0; d < n; ++d) g[d] = gauss(rng);
      gs.push_back(g.normalized());
    }
    Eigen::VectorXd U(n);
    for (int d = 0; d < n; ++d) U[d] = 3.0 * gauss(rng);

    const VelocityCone cone = raw_cone(gs);
    const ProjectionResult r = project_velocity(U, cone);
    const Eigen::VectorXd v_oracle = oracle_project(U, cone);
    CHECK((r.v - v_oracle).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(r.kkt_residual <= 1e-8 * (1.0 + U.norm()));
    CHECK(r.eta.minCoeff() >= 0.0);
  }
}

TEST_CASE("projection is idempotent and nonexpansive") {
  std::mt19937 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 6;
    std::vector<Eigen::VectorXd> gs;
    for (int k = 0; k < 1 + trial % 5; ++k) {
      Eigen::VectorXd g(n);
      for (int d = 0; d < n; ++d) g[d] = gauss(rng);
      gs.push_back(g.normalized());
    }
    const VelocityCone cone = raw_cone(gs);
    Eigen::VectorXd u1(n), u2(n);
    for (int d = 0; d < n; ++d) {
      u1[d] = 4.0 * gauss(rng);
      u2[d] = 4.0 * gauss(rng);
    }
    const Eigen::VectorXd v1 = project_velocity(u1, cone).v;
    const Eigen::VectorXd v2 = project_velocity(u2, cone).v;
    CHECK((project_velocity(v1, cone).v - v1).norm() <= 1e-10);
    CHECK((v1 - v2).norm() <= (u1 - u2).norm() + 1e-10);
  }
}

TEST_CASE("KKT triple holds on every returned result") {
  std::mt19937 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 7;
    const int m = 1 + trial % 6;
    std::vector<Eigen::VectorXd> gs;
    for (int k = 0; k < m; ++k) {
      Eigen::VectorXd g(n);
      for (int d = 0; d < n; ++d) g[d] = gauss(rng);
      gs.push_back(g.normalized());
    }
    Eigen::VectorXd U(n);
    for (int d = 0; d < n; ++d) U[d] = 5.0 * gauss(rng);
    const VelocityCone cone = raw_cone(gs);
    const ProjectionResult r = project_velocity(U, cone);

    Eigen::VectorXd recon = U;  // stationarity: v = U + sum eta_k g_k
    for (int k = 0; k < m; ++k) recon += r.eta[k] * gs[k];
    CHECK((r.v - recon).lpNorm<Eigen::Infinity>() <= r.kkt_residual + 1e-12);
    for (int k = 0; k < m; ++k) {
      const double w = gs[k].dot(r.v);
      CHECK(r.eta[k] >= 0.0);
      CHECK(w >= -r.kkt_residual - 1e-12);
      CHECK(std::abs(r.eta[k] * w) <= r.kkt_residual + 1e-12);
    }
    CHECK(r.kkt_residual <= 1e-8 * (1.0 + U.norm()));
  }
}

TEST_CASE("cone construction from active pairs") {
  Scenario sc = cstest::single_obstacle_scenario();
  CHECK(build_admissible_cone(sc.x0, sc, 1e-8).empty());

  Configuration x(2);
  x << 0, 30;
  const VelocityCone cone = build_admissible_cone(x, sc, 1e-8);
  REQUIRE(cone.size() == 1);
  CHECK(cone.constraints[0].label.kind == PairKind::AgentObstacle);
  CHECK(cone.constraints[0].gradient[1] == doctest::Approx(1.0));

  // Three mutually touching equal disks give three constraints.
  Scenario tri;
  tri.horizon = 1.0;
  for (int k = 0; k < 3; ++k) tri.agents.push_back({1.0, 1.0, Vec2(0, 0)});
  tri.x0 = Configuration(6);
  tri.x0 << 0, 0, 2, 0, 1, std::sqrt(3.0);
  CHECK(build_admissible_cone(tri.x0, tri, 1e-8).size() == 3);
}

TEST_CASE("configuration projection: feasible input unchanged") {
  Scenario sc = cstest::single_obstacle_scenario();
  const ConfigProjectionResult r = project_configuration(sc.x0, sc);
  CHECK((r.x - sc.x0).norm() == doctest::Approx(0.0));
  CHECK(r.corrections.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
}

TEST_CASE("configuration projection: radial push to contact") {
  Scenario sc = cstest::single_obstacle_scenario();
  Configuration y(2);
  y << 0, 29;
  const ConfigProjectionResult r = project_configuration(y, sc);
  CHECK(r.x[0] == doctest::Approx(0.0));
  CHECK(r.x[1] == doctest::Approx(30.0));
  REQUIRE(r.labels.size() == 1);
  CHECK(r.corrections[0] == doctest::Approx(1.0));
}

TEST_CASE("configuration projection: symmetric pair separation") {
  Scenario sc;
  sc.horizon = 1.0;
  sc.agents.push_back({2.0, 1.0, Vec2(0, 0)});
  sc.agents.push_back({2.0, 1.0, Vec2(0, 0)});
  sc.x0 = (Configuration(4) << -2, 0, 2, 0).finished();
  Configuration y(4);
  y << -1, 0, 1, 0;  // overlap depth 2
  const ConfigProjectionResult r = project_configuration(y, sc);
  CHECK(r.x[0] == doctest::Approx(-2.0));
  CHECK(r.x[2] == doctest::Approx(2.0));
  CHECK(std::abs(r.x[0] + r.x[2]) <= 1e-12);  // displaced equally
  CHECK(min_signed_distance(r.x, sc) >= -1e-10);
}

TEST_CASE("configuration projection always lands within tolerance") {
  Scenario sc;
  sc.horizon = 1.0;
  for (int k = 0; k < 4; ++k) sc.agents.push_back({1.0, 1.0, Vec2(0, 0)});
  sc.obstacles.push_back({Vec2(0.0, 0.0), 1.0});
  sc.x0 = (Configuration(8) << 3, 0, -3, 0, 0, 3, 0, -3).finished();
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pos(-2.5, 2.5);
  for (int trial = 0; trial < 40; ++trial) {
    Configuration y(8);
    for (int k = 0; k < 8; ++k) y[k] = pos(rng);
    bool degenerate = false;
    for (int i = 0; i < 4 && !degenerate; ++i) {
      if (y.segment<2>(2 * i).norm() < 1e-3) degenerate = true;
      for (int j = i + 1; j < 4; ++j)
        if ((y.segment<2>(2 * i) - y.segment<2>(2 * j)).norm() < 1e-3) degenerate = true;
    }
    if (degenerate) continue;
    const ConfigProjectionResult r = project_configuration(y, sc, 1e-10);
    CHECK(min_signed_distance(r.x, sc) >= -1e-10);
    CHECK(r.corrections.minCoeff() >= 0.0);
  }
}

TEST_CASE("projection rejects bad tolerance") {
  Scenario sc = cstest::single_obstacle_scenario();
  CHECK_THROWS_AS(project_configuration(sc.x0, sc, 0.0), std::invalid_argument);
}

TEST_CASE("projection reports the best residual when the budget runs out") {
  // A deeply overlapped chain needs several sweeps; one is not enough.
  Scenario sc;
  sc.horizon = 1.0;
  for (int k = 0; k < 5; ++k) sc.agents.push_back({1.0, 1.0, Vec2(0, 0)});
  sc.x0 = (Configuration(10) << 0, 0, 2, 0, 4, 0, 6, 0, 8, 0).finished();
  Configuration y(10);
  y << 0, 0, 0.2, 0, 0.4, 0, 0.6, 0, 0.8, 0;
  try {
    project_configuration(y, sc, 1e-10, 1);
    FAIL("expected ConvergenceFailure");
  } catch (const ConvergenceFailure& e) {
    CHECK(e.best_residual > 0.0);
  }
  // With the default budget the same input converges.
  const ConfigProjectionResult r = project_configuration(y, sc, 1e-10);
  CHECK(min_signed_distance(r.x, sc) >= -1e-10);
}
