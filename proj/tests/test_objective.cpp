#include <doctest.h>

#include <cmath>
#include <memory>

#include "dra/objective.hpp"
#include "dra/rng.hpp"

using namespace dra;
using namespace dra::objective;

namespace {

CostModel penalty_around(double gamma, double beta, double m, double M,
                         double c, int sigma) {
  PenaltyAugmented p;
  p.base = std::make_shared<CostModel>(Quadratic{gamma, beta, 0.0});
  p.m = m;
  p.M = M;
  p.c = c;
  p.sigma = sigma;
  return CostModel(p);
}

double fd_gradient(const CostModel& c, double x) {
  const double h = 1e-6;
  return (value(c, x + h) - value(c, x - h)) / (2.0 * h);
}

}  // namespace

TEST_SUITE("objective") {

TEST_CASE("gradient closed forms") {
  CHECK(gradient(CostModel(Quadratic{0.04, 2.0, 0.0}), 64.0) ==
        doctest::Approx(7.12));

  CostModel le(LogExp{0.5, 0.3, 1.7, 0.0, 0.0});  // zeta = 0 -> pure quadratic
  CHECK(gradient(le, 1.7) == doctest::Approx(0.0));

  // Base gradient zero at x = 75 (2*0.01*75 - 1.5 = 0); penalty adds
  // 2*c*(75-70).
  const CostModel pen = penalty_around(0.01, -1.5, 0.0, 70.0, 1.0, 2);
  CHECK(gradient(pen, 75.0) == doctest::Approx(10.0));
}

TEST_CASE("curvature bounds") {
  auto [v, u] = curvature_bounds(CostModel(Quadratic{0.04, 2.0, 0.0}), 0, 100);
  CHECK(v == doctest::Approx(0.04));
  CHECK(u == doctest::Approx(0.04));

  auto [v2, u2] =
      curvature_bounds(CostModel(LogExp{0.1, 0.2, 0.0, 0.0, 0.2}), -5, 5);
  CHECK(2.0 * u2 == doctest::Approx(0.102));
  CHECK(2.0 * v2 == doctest::Approx(0.1));

  auto [v3, u3] =
      curvature_bounds(CostModel(LogExp{0.1, 0.2, 0.0, 0.0, 0.0}), -5, 5);
  CHECK(u3 == doctest::Approx(0.05));
  CHECK(v3 == doctest::Approx(0.05));

  CHECK_THROWS_AS(
      curvature_bounds(CostModel(Quadratic{1.0, 0.0, 0.0}), 2.0, 1.0),
      IntervalEmpty);
}

TEST_CASE("construction validation") {
  CHECK_THROWS_AS(CostModel(Quadratic{0.0, 1.0, 0.0}), InvalidRange);
  CHECK_THROWS_AS(CostModel(Quadratic{-1.0, 1.0, 0.0}), InvalidRange);
  CHECK_THROWS_AS(CostModel(LogExp{0.0, 0.1, 0.0, 0.0, 0.2}), InvalidRange);
  CHECK_THROWS_AS(penalty_around(0.1, 0.0, 0.0, 10.0, 1.0, 1), InvalidRange);
  CHECK_THROWS_AS(penalty_around(0.1, 0.0, 10.0, 0.0, 1.0, 2), InvalidRange);
}

TEST_CASE("global cost") {
  std::vector<CostModel> costs{CostModel(Quadratic{1.0, 0.0, 2.0}),
                               CostModel(Quadratic{1.0, 0.0, 3.0})};
  Problem p(costs, 0.0);
  CHECK(global_cost(p, {0.0, 0.0}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(global_cost(p, {0.0}), DimensionMismatch);

  // Table 2 types A and B at (50, 50).
  std::vector<CostModel> ab{CostModel(generator_cost('A')),
                            CostModel(generator_cost('B'))};
  Problem pab(ab, 100.0);
  CHECK(global_cost(pab, {50.0, 50.0}) == doctest::Approx(425.0));

  CHECK_THROWS_AS(Problem({CostModel(Quadratic{1.0, 0.0, 0.0})}, 1.0),
                  InvalidRange);
}

TEST_CASE("generator preset table") {
  const auto& t = generator_presets();
  REQUIRE(t.size() == 5);
  CHECK(t[0].type == 'A');
  CHECK(t[0].M == doctest::Approx(80.0));
  CHECK(t[0].beta == doctest::Approx(2.0));
  CHECK(t[0].gamma == doctest::Approx(0.04));
  const Quadratic qb = generator_cost('B');
  CHECK(qb.gamma == doctest::Approx(0.03));
  CHECK(qb.beta == doctest::Approx(3.0));
}

TEST_CASE("change of variables") {
  std::vector<CostModel> costs{CostModel(Quadratic{0.5, 1.0, 0.0}),
                               CostModel(Quadratic{0.25, -1.0, 0.0})};
  SUBCASE("identity coefficients") {
    Problem p(costs, 4.0, std::vector<double>{1.0, 1.0});
    const Problem q = apply_change_of_variables(p);
    for (double x : {0.3, -1.2, 4.0})
      for (int i = 0; i < 2; ++i)
        CHECK(value(q.costs[static_cast<size_t>(i)], x) ==
              doctest::Approx(value(costs[static_cast<size_t>(i)], x)));
  }
  SUBCASE("value equivalence under scaling") {
    Problem p(costs, 4.0, std::vector<double>{2.0, -0.5});
    const Problem q = apply_change_of_variables(p);
    // f~_i(x) must equal f_i(x / a_i).
    for (double z : {0.7, -2.0, 3.1}) {
      CHECK(value(q.costs[0], 2.0 * z) == doctest::Approx(value(costs[0], z)));
      CHECK(value(q.costs[1], -0.5 * z) == doctest::Approx(value(costs[1], z)));
    }
  }
  SUBCASE("box transforms") {
    PenaltyAugmented pa;
    pa.base = std::make_shared<CostModel>(Quadratic{1.0, 0.0, 0.0});
    pa.m = 0.0;
    pa.M = 5.0;
    pa.c = 1.0;
    pa.sigma = 2;
    std::vector<CostModel> pc{CostModel(pa), CostModel(pa)};
    Problem p(pc, 1.0, std::vector<double>{2.0, -1.0});
    const Problem q = apply_change_of_variables(p);
    CHECK(q.costs[0].as_penalty().m == doctest::Approx(0.0));
    CHECK(q.costs[0].as_penalty().M == doctest::Approx(10.0));
    CHECK(q.costs[1].as_penalty().m == doctest::Approx(-5.0));
    CHECK(q.costs[1].as_penalty().M == doctest::Approx(0.0));
  }
  SUBCASE("zero coefficient rejected") {
    CHECK_THROWS_AS(Problem(costs, 1.0, std::vector<double>{1.0, 0.0}),
                    ZeroCoefficient);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng = Rng::seeded(4242);
  int samples = 0;
  while (samples < 1000) {
    const double x = rng.uniform(-20.0, 20.0);
    CostModel c = [&]() -> CostModel {
      switch (rng.uniform_int(4)) {
        case 0:
          return CostModel(Quadratic{rng.uniform(0.01, 2.0),
                                     rng.uniform(-3.0, 3.0), 0.0});
        case 1:
          return CostModel(LogExp{rng.uniform(0.05, 1.0),
                                  rng.uniform(-0.5, 0.5),
                                  rng.uniform(-1.0, 1.0),
                                  rng.uniform(-1.0, 1.0), 0.2});
        case 2:
          return penalty_around(rng.uniform(0.05, 1.0), 0.0, -10.0, 10.0,
                                rng.uniform(0.1, 2.0),
                                2 + static_cast<int>(rng.uniform_int(2)));
        default: {
          SmoothPenaltyAugmented sp;
          sp.base =
              std::make_shared<CostModel>(Quadratic{rng.uniform(0.05, 1.0), 0.0, 0.0});
          sp.m = -10.0;
          sp.M = 10.0;
          sp.c = rng.uniform(0.1, 2.0);
          sp.mu = 10.0;
          return CostModel(sp);
        }
      }
    }();
    const double g = gradient(c, x);
    const double fd = fd_gradient(c, x);
    CHECK(std::abs(g - fd) <= 1e-5 * std::max(1.0, std::abs(g)));
    ++samples;
  }
}

TEST_CASE("gradients are strictly monotone") {
  Rng rng = Rng::seeded(77);
  for (int t = 0; t < 200; ++t) {
    CostModel c = t % 2 == 0
                      ? CostModel(Quadratic{rng.uniform(0.01, 1.0),
                                            rng.uniform(-2.0, 2.0), 0.0})
                      : CostModel(LogExp{rng.uniform(0.05, 0.5),
                                         rng.uniform(-0.3, 0.3),
                                         rng.uniform(-1.0, 1.0),
                                         rng.uniform(-1.0, 1.0), 0.2});
    double x1 = rng.uniform(-30.0, 30.0);
    double x2 = rng.uniform(-30.0, 30.0);
    if (x1 == x2) continue;
    if (x1 > x2) std::swap(x1, x2);
    CHECK(gradient(c, x1) < gradient(c, x2));
  }
}

TEST_CASE("sampled second derivative stays inside the curvature bounds") {
  Rng rng = Rng::seeded(55);
  for (int t = 0; t < 10; ++t) {
    CostModel c(LogExp{rng.uniform(0.05, 0.5), rng.uniform(-0.4, 0.4),
                       rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.2});
    const double lo = -8.0, hi = 8.0;
    auto [v, u] = curvature_bounds(c, lo, hi);
    for (int s = 0; s < 100; ++s) {
      const double x = lo + (hi - lo) * (s + 0.5) / 100.0;
      const double d2 = second_derivative(c, x);
      CHECK(d2 >= 2.0 * v - 1e-6);
      CHECK(d2 <= 2.0 * u + 1e-6);
    }
  }
}

TEST_CASE("smooth penalty approaches the exact hinge") {
  for (double mu : {10.0, 100.0}) {
    SmoothPenaltyAugmented sp;
    sp.base = std::make_shared<CostModel>(Quadratic{0.5, 0.0, 0.0});
    sp.m = 0.0;
    sp.M = 5.0;
    sp.c = 1.0;
    sp.mu = mu;
    CostModel smooth(sp);
    double worst = 0.0;
    for (int s = 0; s <= 400; ++s) {
      const double x = -3.0 + 11.0 * s / 400.0;
      const double hinge = 0.5 * x * x + std::max(x - 5.0, 0.0) +
                           std::max(0.0 - x, 0.0);
      worst = std::max(worst, std::abs(value(smooth, x) - hinge));
    }
    CHECK(worst <= 1.0 / mu);
  }
}

}  // TEST_SUITE
