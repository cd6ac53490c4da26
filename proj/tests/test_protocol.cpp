#include <doctest.h>

#include <cmath>

#include "dra/oracle.hpp"
#include "dra/protocol.hpp"
#include "dra/rng.hpp"

using namespace dra;
using namespace dra::protocol;

namespace {

objective::Problem two_gen(double b) {
  std::vector<objective::CostModel> costs{
      objective::CostModel(objective::Quadratic{0.04, 2.0, 0.0}),
      objective::CostModel(objective::Quadratic{0.03, 3.0, 0.0})};
  return objective::Problem(std::move(costs), b);
}

graph::WeightedGraph pair_graph(double w) {
  graph::WeightedGraph g(2, false);
  g.add_edge(0, 1, w);
  return g;
}

objective::Problem random_quadratics(int n, double b, std::uint64_t seed) {
  Rng rng = Rng::seeded(seed);
  std::vector<objective::CostModel> costs;
  for (int i = 0; i < n; ++i)
    costs.emplace_back(objective::Quadratic{rng.uniform(0.02, 0.08),
                                            rng.uniform(1.0, 4.0), 0.0});
  return objective::Problem(std::move(costs), b);
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("feasible initialization") {
  {
    const objective::Problem p = random_quadratics(50, 3200.0, 1);
    const AllocationState s = feasible_init(p, InitMode::Uniform);
    for (double xi : s.x) CHECK(xi == doctest::Approx(64.0));
  }
  {
    const objective::Problem p = two_gen(0.0);
    const AllocationState s = feasible_init(p, InitMode::Uniform);
    CHECK(s.x[0] == 0.0);
    CHECK(s.x[1] == 0.0);
  }
  for (std::uint64_t seed : {1ULL, 9ULL, 1234ULL}) {
    const objective::Problem p = random_quadratics(17, -4.5, seed);
    const AllocationState s = feasible_init(p, InitMode::RandomFeasible, seed);
    CHECK(std::abs(feasibility_drift(s.x, p.b)) <= 1e-12);
  }
}

TEST_CASE("node-based step: equilibrium and empty graph") {
  // Identical costs and equal states -> equal gradients -> no movement.
  std::vector<objective::CostModel> costs(
      3, objective::CostModel(objective::Quadratic{0.05, 1.0, 0.0}));
  objective::Problem p(costs, 30.0);
  ProtocolConfig cfg;
  cfg.step_T = 0.1;
  AllocationState s = feasible_init(p, InitMode::Uniform);

  graph::WeightedGraph tri(3, false);
  tri.add_edge(0, 1, 1.0);
  tri.add_edge(1, 2, 0.5);
  AllocationState before = s;
  step_node_based(s, p, tri, cfg);
  for (int i = 0; i < 3; ++i) CHECK(s.x[static_cast<size_t>(i)] == before.x[static_cast<size_t>(i)]);

  graph::WeightedGraph empty(3, false);
  step_node_based(s, p, empty, cfg);
  for (int i = 0; i < 3; ++i) CHECK(s.x[static_cast<size_t>(i)] == before.x[static_cast<size_t>(i)]);
}

TEST_CASE("node-based step matches the scalar recursion for two agents") {
  const objective::Problem p = two_gen(100.0);
  ProtocolConfig cfg;
  cfg.step_T = 0.1;
  AllocationState s = feasible_init(p, InitMode::Uniform);

  // Independent hand iteration of
  //   x1 <- x1 - T w (2 g1 x1 + b1 - 2 g2 x2 - b2), x2 <- x2 + same term.
  double x1 = 50.0, x2 = 50.0;
  const graph::WeightedGraph g = pair_graph(1.0);
  for (int k = 0; k < 3; ++k) {
    const double diff = 2.0 * 0.04 * x1 + 2.0 - (2.0 * 0.03 * x2 + 3.0);
    x1 -= 0.1 * diff;
    x2 += 0.1 * diff;
    step_node_based(s, p, g, cfg);
    CHECK(s.x[0] == doctest::Approx(x1).epsilon(1e-14));
    CHECK(s.x[1] == doctest::Approx(x2).epsilon(1e-14));
  }
  CHECK(s.step == 3);
}

TEST_CASE("node-based rejects directed graphs") {
  const objective::Problem p = two_gen(100.0);
  ProtocolConfig cfg;
  graph::WeightedGraph d(2, true);
  d.add_edge(0, 1, 1.0);
  AllocationState s = feasible_init(p, InitMode::Uniform);
  CHECK_THROWS_AS(step_node_based(s, p, d, cfg), DirectedGraphRejected);
}

TEST_CASE("link-based equals node-based under identity") {
  const objective::Problem p = random_quadratics(8, 120.0, 3);
  const graph::WeightedGraph g =
      graph::generate_erdos_renyi(8, 0.5, 0.1, 0.4, 17);
  ProtocolConfig cfg;
  cfg.step_T = 0.05;
  AllocationState a = feasible_init(p, InitMode::RandomFeasible, 5);
  AllocationState b = a;
  for (int k = 0; k < 50; ++k) {
    step_node_based(a, p, g, cfg);
    step_link_based(b, p, g, cfg);
    for (int i = 0; i < 8; ++i)
      CHECK(std::abs(a.x[static_cast<size_t>(i)] - b.x[static_cast<size_t>(i)]) <= 1e-12);
  }
}

TEST_CASE("link-based on a weight-balanced directed cycle conserves the sum") {
  const objective::Problem p = random_quadratics(3, 90.0, 11);
  graph::WeightedGraph cyc(3, true);
  cyc.add_edge(0, 1, 0.2);
  cyc.add_edge(1, 2, 0.2);
  cyc.add_edge(2, 0, 0.2);
  ProtocolConfig cfg;
  cfg.step_T = 0.05;
  AllocationState s = feasible_init(p, InitMode::Uniform);
  for (int k = 0; k < 1000; ++k) step_link_based(s, p, cyc, cfg);
  CHECK(std::abs(feasibility_drift(s.x, p.b)) <= 1e-9);

  graph::WeightedGraph bad(2, true);
  bad.add_edge(0, 1, 1.0);
  CHECK_THROWS_AS(step_link_based(s, random_quadratics(2, 10.0, 1), bad, cfg),
                  DirectedUnbalanced);
}

TEST_CASE("run with zero steps returns just the initial record") {
  const objective::Problem p = two_gen(100.0);
  ProtocolConfig cfg;
  cfg.max_steps = 0;
  const AllocationState init = feasible_init(p, InitMode::Uniform);
  const RunResult r = protocol::run(
      p, graph::NetworkSchedule::single(pair_graph(1.0)), cfg, init, 0.0);
  CHECK(r.trace.size() == 1);
  CHECK(r.status == RunStatus::MaxSteps);
}

TEST_CASE("run reaches gradient consensus below the step bound") {
  const objective::Problem p = random_quadratics(10, 500.0, 21);
  graph::WeightedGraph g = graph::generate_erdos_renyi(10, 0.6, 0.1, 0.5, 9);
  REQUIRE(graph::is_connected(g));
  const oracle::OracleSolution sol = oracle::solve_kkt(p);
  ProtocolConfig cfg;
  cfg.step_T = 0.5;  // far below 1/(u*lambda_n) for these weights
  cfg.max_steps = 60000;
  const AllocationState init = feasible_init(p, InitMode::Uniform);
  const RunResult r = protocol::run(p, graph::NetworkSchedule::single(g), cfg,
                                    init, sol.f_star);
  CHECK(r.trace.back().grad_dispersion < 1e-6);
  for (int i = 0; i < 10; ++i)
    CHECK(std::abs(r.final_state.x[static_cast<size_t>(i)] -
                   sol.x_star[static_cast<size_t>(i)]) < 1e-4);
}

TEST_CASE("descent property for quadratic costs under identity map") {
  const objective::Problem p = random_quadratics(6, 60.0, 2);
  graph::WeightedGraph g = graph::generate_erdos_renyi(6, 0.8, 0.2, 0.6, 4);
  REQUIRE(graph::is_connected(g));
  const oracle::OracleSolution sol = oracle::solve_kkt(p);
  ProtocolConfig cfg;
  cfg.step_T = 0.4;
  cfg.max_steps = 2000;
  const RunResult r =
      protocol::run(p, graph::NetworkSchedule::single(g), cfg,
                    feasible_init(p, InitMode::RandomFeasible, 8), sol.f_star);
  for (size_t k = 0; k + 1 < r.trace.size(); ++k)
    CHECK(r.trace[k + 1].residual <= r.trace[k].residual + 1e-12);
}

TEST_CASE("feasibility conservation across variants and maps") {
  const objective::Problem p = random_quadratics(12, 240.0, 31);
  const graph::WeightedGraph g =
      graph::generate_erdos_renyi(12, 0.4, 0.05, 0.3, 77);
  const nonlinearity::NonlinearMap maps[] = {
      nonlinearity::NonlinearMap::identity(),
      nonlinearity::NonlinearMap::saturation(0.02, 5.0),
      nonlinearity::NonlinearMap::log_quantizer(0.125),
      nonlinearity::NonlinearMap::fixed_time(0.4, 1.6, 10.0),
      nonlinearity::NonlinearMap::uniform_quantizer(0.2),
  };
  for (const auto& m : maps)
    for (Variant v : {Variant::NodeBased, Variant::LinkBased}) {
      ProtocolConfig cfg;
      cfg.variant = v;
      cfg.map = m;
      cfg.step_T = 0.05;
      AllocationState s = feasible_init(p, InitMode::RandomFeasible, 64);
      for (int k = 0; k < 1000; ++k) {
        if (v == Variant::NodeBased)
          step_node_based(s, p, g, cfg);
        else
          step_link_based(s, p, g, cfg);
      }
      CHECK(std::abs(feasibility_drift(s.x, p.b)) <= 1e-9 * 240.0);
    }
}

TEST_CASE("switching schedule run completes without connectivity enforcement") {
  const objective::Problem p = random_quadratics(4, 40.0, 5);
  graph::WeightedGraph lonely(4, false);
  lonely.add_edge(1, 2, 0.3);  // node 0 never connected
  graph::NetworkSchedule sched({{1, lonely}}, 1);
  CHECK(!graph::check_uniform_connectivity(sched).connected);
  ProtocolConfig cfg;
  cfg.max_steps = 100;
  const RunResult r = protocol::run(
      p, sched, cfg, feasible_init(p, InitMode::Uniform), 0.0);
  CHECK(r.trace.size() == 101);
}

}  // TEST_SUITE
