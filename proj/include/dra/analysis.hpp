#pragma once

#include <iosfwd>
#include <vector>

#include "dra/graph.hpp"
#include "dra/objective.hpp"
#include "dra/trace.hpp"

namespace dra::analysis {

struct StepBoundReport {
  double epsilon = 0.0;
  double k_g = 0.0;
  double u = 0.0;
  double lambda2 = 0.0;
  double lambda_n = 0.0;
  double t_lambda = 0.0;

  // Linear-rate envelope 1 + 4 v (u K_g^2 T^2 lambda_n^2 - T lambda2 eps);
  // equals 1 exactly at T = t_lambda.
  double rate_bound_coefficient(double T, double v) const;
};

// T_lambda = eps * lambda2 / (u * K_g^2 * lambda_n^2). All inputs must be
// positive.
StepBoundReport compute_step_bound(double epsilon, double k_g, double u,
                                   const graph::SpectralSummary& spec);

// F(x) - F(x_star), clamped below at the -1e-9 reporting tolerance.
double residual(const objective::Problem& p, const std::vector<double>& x,
                const std::vector<double>& oracle_opt);

struct RateCertificate {
  bool certified = true;
  long first_violating_step = -1;
};

// Checks every consecutive residual ratio against the rate envelope while the
// residual stays above the 1e-12 float floor. Meaningful only for delay-free
// runs over a static connected graph.
RateCertificate certify_rate(const Trace& trace, const StepBoundReport& bound,
                             double T, double v);

// Verifies (1/4u) * ||d||^2 <= F(x) - F* <= (1/4v) * ||d||^2 where d is the
// gradient vector minus its mean. Requires 0 < v <= u and feasible x.
bool sandwich_check(const objective::Problem& p, const std::vector<double>& x,
                    double v, double u);

// CSV export, 17 significant digits so reruns are byte-identical.
void write_trace_csv(std::ostream& os, const Trace& trace);
// Per-agent states (only rows whose records carry snapshots).
void write_states_csv(std::ostream& os, const Trace& trace);

}  // namespace dra::analysis
