#include "dra/objective.hpp"

#include <cmath>

namespace dra::objective {

namespace {

// log(1 + exp(z)) without overflow for large |z|.
double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z)) without overflow.
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

CostModel::CostModel(Quadratic q) : kind_(Kind::Quadratic), quad_(q) {
  if (!(q.gamma > 0.0))
    throw InvalidRange("quadratic cost needs gamma > 0 for strict convexity");
}

CostModel::CostModel(LogExp l) : kind_(Kind::LogExp), logexp_(l) {
  if (!(l.alpha > 0.0))
    throw InvalidRange("log-exp cost needs alpha > 0 for strong convexity");
}

CostModel::CostModel(PenaltyAugmented p)
    : kind_(Kind::PenaltyAugmented), penalty_(std::move(p)) {
  if (!penalty_.base) throw InvalidRange("penalty needs a base cost");
  if (penalty_.sigma < 2)
    throw InvalidRange("penalty exponent sigma must be >= 2; use the smooth "
                       "variant for sigma = 1");
  if (!(penalty_.c > 0.0)) throw InvalidRange("penalty scale c must be > 0");
  if (penalty_.m > penalty_.M) throw InvalidRange("box needs m <= M");
}

CostModel::CostModel(SmoothPenaltyAugmented p)
    : kind_(Kind::SmoothPenaltyAugmented), smooth_(std::move(p)) {
  if (!smooth_.base) throw InvalidRange("penalty needs a base cost");
  if (!(smooth_.c > 0.0)) throw InvalidRange("penalty scale c must be > 0");
  if (!(smooth_.mu > 0.0)) throw InvalidRange("smoothing mu must be > 0");
  if (smooth_.m > smooth_.M) throw InvalidRange("box needs m <= M");
}

double value(const CostModel& cost, double x) {
  switch (cost.kind()) {
    case CostModel::Kind::Quadratic: {
      const auto& q = cost.as_quadratic();
      return q.gamma * x * x + q.beta * x + q.alpha;
    }
    case CostModel::Kind::LogExp: {
      const auto& l = cost.as_logexp();
      const double d = x - l.gamma;
      return 0.5 * l.alpha * d * d + l.zeta * softplus(l.beta * (x - l.eta));
    }
    case CostModel::Kind::PenaltyAugmented: {
      const auto& p = cost.as_penalty();
      const double over = std::max(x - p.M, 0.0);
      const double under = std::max(p.m - x, 0.0);
      return value(*p.base, x) +
             p.c * (std::pow(over, p.sigma) + std::pow(under, p.sigma));
    }
    case CostModel::Kind::SmoothPenaltyAugmented: {
      const auto& p = cost.as_smooth_penalty();
      return value(*p.base, x) +
             p.c * (softplus(p.mu * (x - p.M)) + softplus(p.mu * (p.m - x))) /
                 p.mu;
    }
  }
  return 0.0;
}

double gradient(const CostModel& cost, double x) {
  switch (cost.kind()) {
    case CostModel::Kind::Quadratic: {
      const auto& q = cost.as_quadratic();
      return 2.0 * q.gamma * x + q.beta;
    }
    case CostModel::Kind::LogExp: {
      const auto& l = cost.as_logexp();
      return l.alpha * (x - l.gamma) +
             l.zeta * l.beta * logistic(l.beta * (x - l.eta));
    }
    case CostModel::Kind::PenaltyAugmented: {
      const auto& p = cost.as_penalty();
      const double over = std::max(x - p.M, 0.0);
      const double under = std::max(p.m - x, 0.0);
      double g = gradient(*p.base, x);
      if (over > 0.0) g += p.c * p.sigma * std::pow(over, p.sigma - 1);
      if (under > 0.0) g -= p.c * p.sigma * std::pow(under, p.sigma - 1);
      return g;
    }
    case CostModel::Kind::SmoothPenaltyAugmented: {
      const auto& p = cost.as_smooth_penalty();
      return gradient(*p.base, x) + p.c * logistic(p.mu * (x - p.M)) -
             p.c * logistic(p.mu * (p.m - x));
    }
  }
  return 0.0;
}

double second_derivative(const CostModel& cost, double x) {
  switch (cost.kind()) {
    case CostModel::Kind::Quadratic:
      return 2.0 * cost.as_quadratic().gamma;
    case CostModel::Kind::LogExp: {
      const auto& l = cost.as_logexp();
      const double s = logistic(l.beta * (x - l.eta));
      return l.alpha + l.zeta * l.beta * l.beta * s * (1.0 - s);
    }
    case CostModel::Kind::PenaltyAugmented: {
      const auto& p = cost.as_penalty();
      const double over = std::max(x - p.M, 0.0);
      const double under = std::max(p.m - x, 0.0);
      double h = second_derivative(*p.base, x);
      const double k = p.c * p.sigma * (p.sigma - 1);
      if (over > 0.0) h += k * std::pow(over, p.sigma - 2);
      if (under > 0.0) h += k * std::pow(under, p.sigma - 2);
      return h;
    }
    case CostModel::Kind::SmoothPenaltyAugmented: {
      const auto& p = cost.as_smooth_penalty();
      const double s1 = logistic(p.mu * (x - p.M));
      const double s2 = logistic(p.mu * (p.m - x));
      return second_derivative(*p.base, x) +
             p.c * p.mu * (s1 * (1.0 - s1) + s2 * (1.0 - s2));
    }
  }
  return 0.0;
}

std::pair<double, double> curvature_bounds(const CostModel& cost, double lo,
                                           double hi) {
  if (!(lo < hi)) throw IntervalEmpty("curvature interval must satisfy lo < hi");
  switch (cost.kind()) {
    case CostModel::Kind::Quadratic: {
      const double g = cost.as_quadratic().gamma;
      return {g, g};
    }
    case CostModel::Kind::LogExp: {
      const auto& l = cost.as_logexp();
      // logistic curvature peaks at 1/4
      return {l.alpha / 2.0, (l.alpha + l.zeta * l.beta * l.beta / 4.0) / 2.0};
    }
    case CostModel::Kind::PenaltyAugmented: {
      const auto& p = cost.as_penalty();
      auto [v, u] = curvature_bounds(*p.base, lo, hi);
      const double overshoot =
          std::max(std::max(hi - p.M, 0.0), std::max(p.m - lo, 0.0));
      if (overshoot > 0.0) {
        u += 0.5 * p.c * p.sigma * (p.sigma - 1) *
             std::pow(overshoot, p.sigma - 2);
      }
      return {v, u};
    }
    case CostModel::Kind::SmoothPenaltyAugmented: {
      const auto& p = cost.as_smooth_penalty();
      auto [v, u] = curvature_bounds(*p.base, lo, hi);
      u += p.c * p.mu / 4.0;
      return {v, u};
    }
  }
  return {0.0, 0.0};
}

Problem::Problem(std::vector<CostModel> costs_in, double b_in,
                 std::optional<std::vector<double>> a_in)
    : costs(std::move(costs_in)), b(b_in), a(std::move(a_in)) {
  if (costs.size() < 2) throw InvalidRange("problem needs at least 2 agents");
  if (a) {
    if (a->size() != costs.size())
      throw DimensionMismatch("constraint coefficients must match agent count");
    for (double ai : *a)
      if (ai == 0.0) throw ZeroCoefficient("constraint coefficient a_i = 0");
  }
}

namespace {

CostModel transform_cost(const CostModel& cost, double ai) {
  switch (cost.kind()) {
    case CostModel::Kind::Quadratic: {
      const auto& q = cost.as_quadratic();
      return Quadratic{q.gamma / (ai * ai), q.beta / ai, q.alpha};
    }
    case CostModel::Kind::LogExp: {
      const auto& l = cost.as_logexp();
      return LogExp{l.alpha / (ai * ai), l.beta / ai, ai * l.gamma,
                    ai * l.eta, l.zeta};
    }
    case CostModel::Kind::PenaltyAugmented: {
      const auto& p = cost.as_penalty();
      auto base = std::make_shared<CostModel>(transform_cost(*p.base, ai));
      const double abs_a = std::abs(ai);
      double m = ai * p.m, M = ai * p.M;
      if (ai < 0.0) std::swap(m, M);  // box order reverses
      return PenaltyAugmented{std::move(base), m, M,
                              p.c / std::pow(abs_a, p.sigma), p.sigma};
    }
    case CostModel::Kind::SmoothPenaltyAugmented: {
      const auto& p = cost.as_smooth_penalty();
      auto base = std::make_shared<CostModel>(transform_cost(*p.base, ai));
      const double abs_a = std::abs(ai);
      double m = ai * p.m, M = ai * p.M;
      if (ai < 0.0) std::swap(m, M);
      return SmoothPenaltyAugmented{std::move(base), m, M, p.c / abs_a,
                                    p.mu / abs_a};
    }
  }
  return cost;
}

}  // namespace

Problem apply_change_of_variables(const Problem& p) {
  if (!p.a) return p;
  std::vector<CostModel> costs;
  costs.reserve(p.costs.size());
  for (size_t i = 0; i < p.costs.size(); ++i)
    costs.push_back(transform_cost(p.costs[i], (*p.a)[i]));
  return Problem(std::move(costs), p.b);
}

double global_cost(const Problem& p, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != p.n())
    throw DimensionMismatch("state dimension does not match agent count");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += value(p.costs[i], x[i]);
  return s;
}

const std::vector<GeneratorPreset>& generator_presets() {
  static const std::vector<GeneratorPreset> table = {
      {'A', 80.0, 2.0, 0.04},  {'B', 90.0, 3.0, 0.03}, {'C', 70.0, 4.0, 0.035},
      {'D', 70.0, 4.0, 0.03},  {'E', 80.0, 2.5, 0.04},
  };
  return table;
}

Quadratic generator_cost(char type) {
  for (const auto& g : generator_presets())
    if (g.type == type) return Quadratic{g.gamma, g.beta, 0.0};
  throw InvalidRange(std::string("unknown generator type: ") + type);
}

}  // namespace dra::objective
