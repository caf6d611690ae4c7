#include <doctest.h>

#include <functional>
#include <random>

#include "anytrack/search.hpp"
#include "support.hpp"

using namespace anytrack;

namespace {

JointConfig cfg(std::initializer_list<double> v) {
  JointConfig q(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) q[i++] = x;
  return q;
}

KinematicChain point_chain(double vel) {
  std::vector<ChainJoint> joints(2);
  for (auto& j : joints) j.vel_max = vel;
  return KinematicChain("points", joints);
}

// Enumerates every first-to-last path through find_edge and keeps the
// lexicographically smallest cost.
std::optional<Cost> brute_force(const LayeredGraph& g, Metric metric, EdgeFilter filter) {
  std::optional<Cost> best;
  std::function<void(VertexId, Cost)> walk = [&](VertexId u, Cost c) {
    if (u.layer + 1 == g.num_layers()) {
      if (!best || c < *best) best = c;
      return;
    }
    for (std::size_t y = u.layer + 1; y < g.num_layers(); ++y) {
      if (y > u.layer + 1 && filter == EdgeFilter::DenseOnly) break;
      for (std::uint32_t b = 0; b < g.layer(y).size(); ++b) {
        const auto e = g.find_edge(u, {static_cast<std::uint32_t>(y), b});
        if (!e) continue;
        if (is_reconfig(e->kind) && !admits_reconfig(metric)) continue;
        walk(e->to, extend_cost(metric, c, {e->movement, is_reconfig(e->kind)}));
      }
    }
  };
  for (std::uint32_t a = 0; a < g.layer(0).size(); ++a) walk({0, a}, Cost{});
  return best;
}

LayeredGraph random_graph(std::mt19937_64& rng, bool allow_reconfig) {
  std::uniform_int_distribution<int> layers_d(2, 6), count_d(1, 5);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  const int n = layers_d(rng);
  const auto chain = point_chain(1.0);
  LayeredGraph g(test::stationary_trajectory(Pose(), n, 0.1), 0.0);
  for (int x = 0; x < n; ++x) {
    std::vector<JointConfig> add;
    const int k = count_d(rng);
    for (int i = 0; i < k; ++i) add.push_back(cfg({u(rng), u(rng)}));
    g.add_vertices(static_cast<std::size_t>(x), add);
  }
  for (int x = 0; x + 1 < n; ++x) g.connect_dense(static_cast<std::size_t>(x), chain, allow_reconfig);
  for (int x = 0; x + 2 < n; x += 2) {
    g.connect_sparse(static_cast<std::size_t>(x), static_cast<std::size_t>(std::min(x + 3, n - 1)), chain,
                     allow_reconfig);
  }
  return g;
}

}  // namespace

TEST_SUITE("search") {
  TEST_CASE("cost folding") {
    const std::vector<EdgeCost> two{{0.1, false}, {0.2, false}};
    CHECK(fold_cost(Metric::MovementOnly, two).movement == doctest::Approx(0.3));
    CHECK(fold_cost(Metric::MaxJointDelta, two).movement == doctest::Approx(0.2));
    const std::vector<EdgeCost> three{{0.1, false}, {2.0, true}, {0.1, false}};
    const Cost c = fold_cost(Metric::LexReconfigMovement, three);
    CHECK(c.reconfigs == 1);
    CHECK(c.movement == doctest::Approx(2.2));
    CHECK(Cost{0, 5.0} < Cost{1, 0.0});
    CHECK(Cost{1, 0.5} < Cost{1, 0.6});
  }

  TEST_CASE("single edge") {
    const auto chain = point_chain(10.0);
    LayeredGraph g(test::stationary_trajectory(Pose(), 2, 0.1), 0.0);
    const std::vector<JointConfig> a{cfg({0, 0})}, b{cfg({0.3, 0.4})};
    g.add_vertices(0, a);
    g.add_vertices(1, b);
    g.connect_dense(0, chain, false);
    const auto r = shortest_path(g, Metric::MovementOnly, EdgeFilter::DenseOnly);
    REQUIRE(r.path);
    CHECK(r.path->cost.reconfigs == 0);
    CHECK(r.path->cost.movement == doctest::Approx(0.5));
    CHECK(r.path->is_solution);
    CHECK(r.furthest_layer == 1);
  }

  TEST_CASE("stationary layers cost nothing") {
    const auto chain = point_chain(1.0);
    LayeredGraph g(test::stationary_trajectory(Pose(), 5, 0.1), 0.0);
    const std::vector<JointConfig> v{cfg({0.5, 0}), cfg({0, 0}), cfg({-0.5, 0.2})};
    for (std::size_t x = 0; x < 5; ++x) g.add_vertices(x, v);
    for (std::size_t x = 0; x < 4; ++x) g.connect_dense(x, chain, false);
    const auto r = shortest_path(g, Metric::MovementOnly, EdgeFilter::DenseOnly);
    REQUIRE(r.path);
    CHECK(r.path->cost == Cost{0, 0.0});
    // Ties resolve to the smallest slot.
    for (const auto& v_id : r.path->vertices) CHECK(v_id.slot == 0);
  }

  TEST_CASE("unreachable end reports the furthest layer") {
    const auto chain = point_chain(1.0);
    LayeredGraph g(test::stationary_trajectory(Pose(), 4, 0.1), 0.0);
    const std::vector<JointConfig> near{cfg({0, 0})}, far{cfg({2, 0})};
    g.add_vertices(0, near);
    g.add_vertices(1, near);
    g.add_vertices(2, far);
    g.add_vertices(3, far);
    for (std::size_t x = 0; x < 3; ++x) g.connect_dense(x, chain, false);
    const auto r = shortest_path(g, Metric::MovementOnly, EdgeFilter::DenseOnly);
    CHECK_FALSE(r.path);
    CHECK(r.furthest_layer == 1);
  }

  TEST_CASE("dynamic programming equals brute-force enumeration") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
      const bool allow = trial % 2 == 0;
      const LayeredGraph g = random_graph(rng, allow);
      for (Metric m : {Metric::MovementOnly, Metric::MaxJointDelta, Metric::LexReconfigMovement}) {
        for (EdgeFilter f : {EdgeFilter::DenseOnly, EdgeFilter::DenseAndSparse}) {
          const auto r = shortest_path(g, m, f);
          const auto oracle = brute_force(g, m, f);
          REQUIRE(r.path.has_value() == oracle.has_value());
          if (!oracle) continue;
          CHECK(r.path->cost.reconfigs == oracle->reconfigs);
          CHECK(r.path->cost.movement == doctest::Approx(oracle->movement).epsilon(1e-12));
          if (f == EdgeFilter::DenseOnly) {
            CHECK(r.path->is_solution);
            CHECK(r.path->vertices.size() == g.num_layers());
            const auto recomputed = path_cost(g, m, r.path->vertices);
            REQUIRE(recomputed);
            CHECK(recomputed->movement == doctest::Approx(r.path->cost.movement));
            CHECK(recomputed->reconfigs == r.path->reconfig_edge_count());
          }
        }
      }
    }
  }

  TEST_CASE("path_cost rejects non-edges") {
    const auto chain = point_chain(1.0);
    LayeredGraph g(test::stationary_trajectory(Pose(), 2, 0.1), 0.0);
    const std::vector<JointConfig> a{cfg({0, 0})}, b{cfg({1, 0})};
    g.add_vertices(0, a);
    g.add_vertices(1, b);
    g.connect_dense(0, chain, true);
    const std::vector<VertexId> path{{0, 0}, {1, 0}};
    CHECK_FALSE(path_cost(g, Metric::MovementOnly, path));
    const auto c = path_cost(g, Metric::LexReconfigMovement, path);
    REQUIRE(c);
    CHECK(c->reconfigs == 1);
  }
}
