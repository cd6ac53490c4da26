#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dra/graph.hpp"
#include "dra/rng.hpp"

using namespace dra;
using namespace dra::graph;

namespace {

std::vector<double> lap(const WeightedGraph& g) { return laplacian(g); }

WeightedGraph triangle(double w) {
  WeightedGraph g(3, false);
  g.add_edge(0, 1, w);
  g.add_edge(1, 2, w);
  g.add_edge(0, 2, w);
  return g;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("laplacian of a single weighted edge") {
  WeightedGraph g(2, false);
  g.add_edge(0, 1, 1.0);
  const auto L = lap(g);
  CHECK(L[0] == doctest::Approx(1.0));
  CHECK(L[1] == doctest::Approx(-1.0));
  CHECK(L[2] == doctest::Approx(-1.0));
  CHECK(L[3] == doctest::Approx(1.0));
}

TEST_CASE("laplacian of an empty graph is zero") {
  WeightedGraph g(3, false);
  for (double v : lap(g)) CHECK(v == 0.0);
}

TEST_CASE("triangle with weight 0.5") {
  const WeightedGraph g = triangle(0.5);
  const auto L = lap(g);
  for (int i = 0; i < 3; ++i) CHECK(L[static_cast<size_t>(i * 3 + i)] == doctest::Approx(1.0));
  CHECK(L[1] == doctest::Approx(-0.5));
  auto ev = symmetric_eigenvalues(L, 3);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ev[1] == doctest::Approx(1.5));
  CHECK(ev[2] == doctest::Approx(1.5));
}

TEST_CASE("spectral summary basics") {
  WeightedGraph path(2, false);
  path.add_edge(0, 1, 1.0);
  const SpectralSummary sp = spectral_summary(path);
  CHECK(sp.lambda2 == doctest::Approx(2.0));
  CHECK(sp.lambda_n == doctest::Approx(2.0));

  WeightedGraph isolated(2, false);
  CHECK(spectral_summary(isolated).lambda2 == 0.0);

  WeightedGraph k4(4, false);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) k4.add_edge(i, j, 1.0);
  const SpectralSummary s4 = spectral_summary(k4);
  CHECK(s4.lambda2 == doctest::Approx(4.0));
  CHECK(s4.lambda_n == doctest::Approx(4.0));
}

TEST_CASE("graph validation errors") {
  WeightedGraph g(3, false);
  CHECK_THROWS_AS(g.add_edge(0, 0, 1.0), InvalidRange);
  CHECK_THROWS_AS(g.add_edge(0, 1, 0.0), InvalidRange);
  CHECK_THROWS_AS(g.add_edge(0, 1, -2.0), InvalidRange);
  CHECK_THROWS_AS(g.add_edge(0, 3, 1.0), InvalidRange);
}

TEST_CASE("uniform connectivity of schedules") {
  WeightedGraph conn(4, false);
  conn.add_edge(0, 1, 1.0);
  conn.add_edge(1, 2, 1.0);
  conn.add_edge(2, 3, 1.0);
  CHECK(check_uniform_connectivity(NetworkSchedule::single(conn)).connected);

  // Two disjoint matchings whose union is the 4-cycle.
  WeightedGraph m1(4, false), m2(4, false);
  m1.add_edge(0, 1, 1.0);
  m1.add_edge(2, 3, 1.0);
  m2.add_edge(1, 2, 1.0);
  m2.add_edge(0, 3, 1.0);
  NetworkSchedule alt({{1, m1}, {1, m2}}, 2);
  CHECK(!is_connected(m1));
  CHECK(check_uniform_connectivity(alt).connected);

  // Node 0 isolated everywhere.
  WeightedGraph iso(3, false);
  iso.add_edge(1, 2, 1.0);
  NetworkSchedule bad({{1, iso}}, 1);
  const ConnectivityReport rep = check_uniform_connectivity(bad);
  CHECK(!rep.connected);
  CHECK(rep.first_violating_window == 0);
}

TEST_CASE("weight balance of digraphs") {
  WeightedGraph cyc(3, true);
  cyc.add_edge(0, 1, 0.2);
  cyc.add_edge(1, 2, 0.2);
  cyc.add_edge(2, 0, 0.2);
  CHECK(is_weight_balanced(cyc));

  WeightedGraph one(2, true);
  one.add_edge(0, 1, 1.0);
  CHECK(!is_weight_balanced(one));

  WeightedGraph uneq(2, true);
  uneq.add_edge(0, 1, 0.1);
  uneq.add_edge(1, 0, 0.3);
  CHECK(!is_weight_balanced(uneq));
}

TEST_CASE("erdos-renyi generation") {
  const WeightedGraph full = generate_erdos_renyi(3, 1.0, 0.5, 0.5, 42);
  CHECK(full.edges().size() == 3);

  const WeightedGraph a = generate_erdos_renyi(20, 0.3, 0.1, 0.9, 7);
  const WeightedGraph b = generate_erdos_renyi(20, 0.3, 0.1, 0.9, 7);
  REQUIRE(a.edges().size() == b.edges().size());
  for (size_t e = 0; e < a.edges().size(); ++e) {
    CHECK(a.edges()[e].i == b.edges()[e].i);
    CHECK(a.edges()[e].j == b.edges()[e].j);
    CHECK(a.edges()[e].w == b.edges()[e].w);
  }

  // Mean edge count across seeds near p * n(n-1)/2 = 245.
  double total = 0.0;
  const int trials = 30;
  for (int s = 0; s < trials; ++s)
    total += static_cast<double>(
        generate_erdos_renyi(50, 0.2, 0.005, 0.025, 100 + static_cast<std::uint64_t>(s))
            .edges()
            .size());
  const double mean = total / trials;
  CHECK(mean > 245.0 * 0.9);
  CHECK(mean < 245.0 * 1.1);

  CHECK_THROWS_AS(generate_erdos_renyi(5, 0.5, 0.0, 1.0, 1), InvalidRange);
}

TEST_CASE("laplacian row sums vanish on random graphs") {
  for (int s = 0; s < 10; ++s) {
    const WeightedGraph g =
        generate_erdos_renyi(15, 0.4, 0.01, 2.0, static_cast<std::uint64_t>(s));
    const auto L = lap(g);
    for (int i = 0; i < 15; ++i) {
      double row = 0.0;
      for (int j = 0; j < 15; ++j) row += L[static_cast<size_t>(i * 15 + j)];
      CHECK(std::abs(row) <= 1e-12);
    }
  }
}

TEST_CASE("laplacian quadratic form is sandwiched by the spectrum") {
  Rng rng = Rng::seeded(99);
  int checked = 0;
  for (int s = 0; s < 40 && checked < 120; ++s) {
    const WeightedGraph g =
        generate_erdos_renyi(10, 0.5, 0.05, 1.5, 1000 + static_cast<std::uint64_t>(s));
    if (!is_connected(g)) continue;
    const SpectralSummary sp = spectral_summary(g);
    const auto L = lap(g);
    for (int t = 0; t < 5; ++t, ++checked) {
      std::vector<double> x(10);
      double mean = 0.0;
      for (double& xi : x) {
        xi = rng.uniform(-3.0, 3.0);
        mean += xi;
      }
      mean /= 10.0;
      double quad = 0.0, norm2 = 0.0, quad_bar = 0.0;
      std::vector<double> xb(10);
      for (int i = 0; i < 10; ++i) xb[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - mean;
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
          quad += x[static_cast<size_t>(i)] * L[static_cast<size_t>(i * 10 + j)] * x[static_cast<size_t>(j)];
          quad_bar += xb[static_cast<size_t>(i)] * L[static_cast<size_t>(i * 10 + j)] * xb[static_cast<size_t>(j)];
        }
      for (double v : xb) norm2 += v * v;
      CHECK(quad >= sp.lambda2 * norm2 - 1e-9 * std::max(1.0, quad));
      CHECK(quad <= sp.lambda_n * norm2 + 1e-9 * std::max(1.0, quad));
      CHECK(std::abs(quad - quad_bar) <= 1e-9 * std::max(1.0, std::abs(quad)));
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("union graphs do not lose connectivity") {
  for (int s = 0; s < 10; ++s) {
    const WeightedGraph g1 =
        generate_erdos_renyi(8, 0.4, 0.1, 1.0, 10 + static_cast<std::uint64_t>(s));
    const WeightedGraph g2 =
        generate_erdos_renyi(8, 0.4, 0.1, 1.0, 50 + static_cast<std::uint64_t>(s));
    NetworkSchedule sched({{1, g1}, {1, g2}}, 2);
    const WeightedGraph u = sched.union_graph();
    auto fiedler = [](const WeightedGraph& g) {
      return is_connected(g) ? spectral_summary(g).lambda2 : 0.0;
    };
    const double lu = fiedler(u);
    CHECK(lu >= fiedler(g1) - 1e-9);
    CHECK(lu >= fiedler(g2) - 1e-9);
  }
}

TEST_CASE("schedule stepping and windows") {
  WeightedGraph a(3, false), b(3, false);
  a.add_edge(0, 1, 1.0);
  b.add_edge(1, 2, 1.0);
  NetworkSchedule sched({{2, a}, {3, b}}, 5);
  CHECK(sched.period() == 5);
  CHECK(sched.at_step(0).edges()[0].j == 1);
  CHECK(sched.at_step(2).edges()[0].i == 1);
  CHECK(sched.at_step(5).edges()[0].j == 1);  // cyclic
  CHECK(sched.union_over_window(0, 5).edges().size() == 2);
  CHECK(sched.union_over_window(0, 2).edges().size() == 1);
}

TEST_CASE("serialization round trip") {
  const WeightedGraph g = generate_erdos_renyi(12, 0.4, 0.01, 0.9, 21);
  std::stringstream ss;
  write_graph(ss, g);
  const WeightedGraph h = read_graph(ss);
  REQUIRE(h.n() == g.n());
  REQUIRE(h.edges().size() == g.edges().size());
  for (size_t e = 0; e < g.edges().size(); ++e) {
    CHECK(h.edges()[e].i == g.edges()[e].i);
    CHECK(h.edges()[e].j == g.edges()[e].j);
    CHECK(h.edges()[e].w == g.edges()[e].w);  // 17 digits: byte-exact
  }
}

TEST_CASE("incident weight normalization bounds the weighted degree") {
  const WeightedGraph g = generate_erdos_renyi(20, 0.4, 0.5, 2.0, 33);
  const WeightedGraph n = normalize_incident_weights(g);
  double maxdeg = 0.0;
  for (int i = 0; i < 20; ++i) maxdeg = std::max(maxdeg, n.weighted_degree(i));
  CHECK(maxdeg <= 1.0 + 1e-12);
  CHECK(maxdeg == doctest::Approx(1.0));
}

}  // TEST_SUITE
