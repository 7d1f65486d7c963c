#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crowdsweep/geometry.hpp"
#include "test_helpers.hpp"

using namespace crowdsweep;

namespace {

Scenario three_agents() {
  Scenario sc;
  sc.agents.push_back({3.0, 8.0, Vec2(0.0, 0.0)});
  sc.agents.push_back({3.0, 8.0, Vec2(0.0, 0.0)});
  sc.agents.push_back({2.0, 5.0, Vec2(1.0, 1.0)});
  sc.obstacles.push_back({Vec2(0.0, 24.0), 3.0});
  sc.obstacles.push_back({Vec2(20.0, 0.0), 1.0});
  sc.horizon = 6.0;
  sc.x0 = (Configuration(6) << 0.0, 0.0, 10.0, 0.0, 0.0, 10.0).finished();
  return sc;
}

}  // namespace

TEST_CASE("agent-agent signed distance") {
  Scenario sc = three_agents();
  Configuration x(6);
  x << 0, 0, 6, 0, 100, 100;
  CHECK(signed_distance_agents(x, 0, 1, sc) == doctest::Approx(0.0));
  x[2] = 10;
  CHECK(signed_distance_agents(x, 0, 1, sc) == doctest::Approx(4.0));
  CHECK(signed_distance_agents(x, 1, 0, sc) == doctest::Approx(4.0));  // symmetry
  CHECK_THROWS_AS(signed_distance_agents(x, 1, 1, sc), std::invalid_argument);
  CHECK_THROWS_AS(signed_distance_agents(x, 0, 7, sc), std::invalid_argument);
}

TEST_CASE("agent-obstacle signed distance") {
  Scenario sc = cstest::single_obstacle_scenario();
  Configuration x(2);
  x << 0, 48;
  CHECK(signed_distance_obstacle(x, 0, 0, sc) == doctest::Approx(18.0));
  x << 0, 30;
  CHECK(signed_distance_obstacle(x, 0, 0, sc) == doctest::Approx(0.0));
  x << 0, 27;
  CHECK(signed_distance_obstacle(x, 0, 0, sc) == doctest::Approx(-3.0));
  CHECK_THROWS_AS(signed_distance_obstacle(x, 0, 3, sc), std::invalid_argument);
}

TEST_CASE("pair gradient structure") {
  Configuration x(4);
  x << 0, 0, 6, 0;
  const Configuration g = pair_gradient(x, 0, 1);
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(0.0));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g[3] == doctest::Approx(0.0));
  CHECK(g.norm() == doctest::Approx(std::sqrt(2.0)));

  Configuration same(4);
  same << 1, 2, 1, 2;
  CHECK_THROWS_AS(pair_gradient(same, 0, 1), DegenerateGeometryError);
}

TEST_CASE("obstacle gradient structure") {
  Scenario sc = cstest::single_obstacle_scenario();
  Configuration x(2);
  x << 0, 30;
  const Configuration g = obstacle_gradient(x, 0, 0, sc);
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(1.0));
  CHECK(g.norm() == doctest::Approx(1.0));

  x << 0, 24;
  CHECK_THROWS_AS(obstacle_gradient(x, 0, 0, sc), DegenerateGeometryError);
}

TEST_CASE("unit direction") {
  const Vec2 u = unit_direction(Vec2(0, 48), Vec2(0, 0));
  CHECK(u.x() == doctest::Approx(0.0));
  CHECK(u.y() == doctest::Approx(1.0));
  const Vec2 v = unit_direction(Vec2(3, 4), Vec2(0, 0));
  CHECK(v.x() == doctest::Approx(0.6));
  CHECK(v.y() == doctest::Approx(0.8));
  CHECK_THROWS_AS(unit_direction(Vec2(1, 1), Vec2(1, 1)), DegenerateGeometryError);
}

TEST_CASE("gradients match finite differences") {
  Scenario sc = three_agents();
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  const double fd_h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    Configuration x(6);
    for (int k = 0; k < 6; ++k) x[k] = pos(rng);
    // Keep away from degenerate geometry.
    if ((x.segment<2>(0) - x.segment<2>(2)).norm() < 0.5) continue;

    auto check_grad = [&](const Configuration& g, auto dist) {
      for (int k = 0; k < 6; ++k) {
        Configuration xp = x, xm = x;
        xp[k] += fd_h;
        xm[k] -= fd_h;
        const double fd = (dist(xp) - dist(xm)) / (2.0 * fd_h);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
      }
    };
    check_grad(pair_gradient(x, 0, 1),
               [&](const Configuration& y) { return signed_distance_agents(y, 0, 1, sc); });
    check_grad(obstacle_gradient(x, 1, 0, sc),
               [&](const Configuration& y) { return signed_distance_obstacle(y, 1, 0, sc); });
  }
}

TEST_CASE("translation invariance of signed distances") {
  Scenario sc = three_agents();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  Configuration x(6);
  x << 0, 0, 10, 0, 0, 10;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec2 t(shift(rng), shift(rng));
    Scenario moved = sc;
    for (Obstacle& o : moved.obstacles) o.center += t;
    Configuration xs = x;
    for (int i = 0; i < 3; ++i) xs.segment<2>(2 * i) += t;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        CHECK(signed_distance_agents(xs, i, j, moved) ==
              doctest::Approx(signed_distance_agents(x, i, j, sc)).epsilon(1e-12));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(signed_distance_obstacle(xs, i, j, moved) ==
              doctest::Approx(signed_distance_obstacle(x, i, j, sc)).epsilon(1e-12));
  }
}

TEST_CASE("active pair detection") {
  Scenario sc = cstest::single_obstacle_scenario();
  CHECK(active_pairs(sc.x0, sc, 1e-9).empty());

  Configuration x(2);
  x << 0, 30;
  auto pairs = active_pairs(x, sc, 1e-9);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].kind == PairKind::AgentObstacle);
  CHECK(pairs[0].value == doctest::Approx(0.0));

  x << 0, 27;  // penetration is active too
  pairs = active_pairs(x, sc, 1e-9);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].value == doctest::Approx(-3.0));
}

TEST_CASE("active pairs with infinite band lists every pair in label order") {
  Scenario sc = three_agents();
  const auto pairs = all_pairs(sc);
  CHECK(pairs.size() == 3 + 3 * 2);  // N(N-1)/2 + N*m
  for (size_t k = 1; k < pairs.size(); ++k) CHECK(label_less(pairs[k - 1], pairs[k]));
}

TEST_CASE("scenario validation names the offender") {
  Scenario sc = cstest::single_obstacle_scenario();
  CHECK_NOTHROW(validate_scenario(sc));

  Scenario bad = sc;
  bad.agents[0].radius = -1.0;
  CHECK_THROWS_AS(validate_scenario(bad), ValidationError);

  bad = sc;
  bad.x0 << 0, 26;  // overlaps the obstacle
  CHECK_THROWS_WITH_AS(validate_scenario(bad),
                       doctest::Contains("obstacle(0,0)"), ValidationError);
}
