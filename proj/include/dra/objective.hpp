#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "dra/errors.hpp"

namespace dra::objective {

// Strictly convex quadratic: gamma x^2 + beta x + alpha, gamma > 0.
struct Quadratic {
  double gamma = 1.0;
  double beta = 0.0;
  double alpha = 0.0;
};

// 0.5 alpha (x - gamma)^2 + zeta log(1 + exp(beta (x - eta))), alpha > 0.
struct LogExp {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double zeta = 0.0;
};

class CostModel;

// base + c ([x - M]^+)^sigma + c ([m - x]^+)^sigma with [u]^+ = max{u, 0},
// sigma >= 2 so the gradient is continuous.
struct PenaltyAugmented {
  std::shared_ptr<const CostModel> base;
  double m = 0.0;
  double M = 0.0;
  double c = 1.0;
  int sigma = 2;
};

// Smooth stand-in for the sigma = 1 hinge: c L(x - M, mu) + c L(m - x, mu)
// with L(z, mu) = log(1 + exp(mu z)) / mu.
struct SmoothPenaltyAugmented {
  std::shared_ptr<const CostModel> base;
  double m = 0.0;
  double M = 0.0;
  double c = 1.0;
  double mu = 10.0;
};

class CostModel {
 public:
  enum class Kind { Quadratic, LogExp, PenaltyAugmented, SmoothPenaltyAugmented };

  CostModel(Quadratic q);                 // NOLINT(google-explicit-constructor)
  CostModel(LogExp l);                    // NOLINT(google-explicit-constructor)
  CostModel(PenaltyAugmented p);          // NOLINT(google-explicit-constructor)
  CostModel(SmoothPenaltyAugmented p);    // NOLINT(google-explicit-constructor)

  Kind kind() const { return kind_; }
  const Quadratic& as_quadratic() const { return quad_; }
  const LogExp& as_logexp() const { return logexp_; }
  const PenaltyAugmented& as_penalty() const { return penalty_; }
  const SmoothPenaltyAugmented& as_smooth_penalty() const { return smooth_; }

 private:
  Kind kind_;
  Quadratic quad_{};
  LogExp logexp_{};
  PenaltyAugmented penalty_{};
  SmoothPenaltyAugmented smooth_{};
};

double value(const CostModel& cost, double x);
double gradient(const CostModel& cost, double x);
double second_derivative(const CostModel& cost, double x);

// (v, u) with 2v <= f'' <= 2u on [lo, hi], from analytic per-kind bounds.
std::pair<double, double> curvature_bounds(const CostModel& cost, double lo,
                                           double hi);

struct Problem {
  std::vector<CostModel> costs;
  double b = 0.0;
  std::optional<std::vector<double>> a;  // weighted-constraint coefficients

  Problem(std::vector<CostModel> costs_in, double b_in,
          std::optional<std::vector<double>> a_in = std::nullopt);

  int n() const { return static_cast<int>(costs.size()); }
};

// Rewrites the weighted constraint sum a_i z_i = b into the unweighted form
// via x_i = a_i z_i, transforming every cost (and box bound) analytically.
Problem apply_change_of_variables(const Problem& p);

double global_cost(const Problem& p, const std::vector<double>& x);

// Table of generator presets (types A-E): M, beta, gamma with alpha = 0 and
// lower box bound m = 20.
struct GeneratorPreset {
  char type;
  double M;
  double beta;
  double gamma;
};
const std::vector<GeneratorPreset>& generator_presets();
Quadratic generator_cost(char type);

}  // namespace dra::objective
