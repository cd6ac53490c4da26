#include "dra/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dra/errors.hpp"
#include "dra/oracle.hpp"

namespace dra::analysis {

double StepBoundReport::rate_bound_coefficient(double T, double v) const {
  return 1.0 + 4.0 * v * (u * k_g * k_g * T * T * lambda_n * lambda_n -
                          T * lambda2 * epsilon);
}

StepBoundReport compute_step_bound(double epsilon, double k_g, double u,
                                   const graph::SpectralSummary& spec) {
  if (!(epsilon > 0.0) || !(k_g > 0.0) || !(u > 0.0) || !(spec.lambda2 > 0.0) ||
      !(spec.lambda_n > 0.0))
    throw NonPositiveInput("compute_step_bound requires positive inputs");
  StepBoundReport r;
  r.epsilon = epsilon;
  r.k_g = k_g;
  r.u = u;
  r.lambda2 = spec.lambda2;
  r.lambda_n = spec.lambda_n;
  r.t_lambda =
      epsilon * spec.lambda2 / (u * k_g * k_g * spec.lambda_n * spec.lambda_n);
  return r;
}

double residual(const objective::Problem& p, const std::vector<double>& x,
                const std::vector<double>& oracle_opt) {
  if (x.size() != static_cast<size_t>(p.n()) || oracle_opt.size() != x.size())
    throw DimensionMismatch("residual: vector sizes must match problem");
  const double v =
      objective::global_cost(p, x) - objective::global_cost(p, oracle_opt);
  return std::max(v, -1e-9);
}

RateCertificate certify_rate(const Trace& trace, const StepBoundReport& bound,
                             double T, double v) {
  RateCertificate cert;
  const double coeff = bound.rate_bound_coefficient(T, v) + 1e-9;
  // Below roughly 10 decades of decay the residual sits in rounding noise of
  // F(x) - F*, so the per-step ratio is no longer meaningful.
  double floor = 1e-12;
  if (!trace.empty()) floor = std::max(floor, 1e-10 * trace.front().residual);
  for (size_t k = 0; k + 1 < trace.size(); ++k) {
    if (trace[k].residual <= floor) continue;
    if (trace[k + 1].residual > coeff * trace[k].residual) {
      cert.certified = false;
      cert.first_violating_step = trace[k + 1].step;
      return cert;
    }
  }
  return cert;
}

bool sandwich_check(const objective::Problem& p, const std::vector<double>& x,
                    double v, double u) {
  if (!(v > 0.0) || v > u)
    throw InvalidRange("sandwich_check requires 0 < v <= u");
  if (x.size() != static_cast<size_t>(p.n()))
    throw DimensionMismatch("sandwich_check: state size mismatch");
  double sum = 0.0;
  for (double xi : x) sum += xi;
  if (std::abs(sum - p.b) > 1e-9 * std::max(1.0, std::abs(p.b)))
    throw InfeasiblePoint("sandwich_check requires a feasible point");

  std::vector<double> grad(x.size());
  double mean = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    grad[i] = objective::gradient(p.costs[i], x[i]);
    mean += grad[i];
  }
  mean /= static_cast<double>(x.size());
  double norm2 = 0.0;
  for (double g : grad) norm2 += (g - mean) * (g - mean);

  const oracle::OracleSolution sol = oracle::solve_kkt(p);
  const double fbar = objective::global_cost(p, x) - sol.f_star;
  const double tol = 1e-9 * std::max(1.0, std::abs(fbar));
  return norm2 / (4.0 * u) <= fbar + tol && fbar <= norm2 / (4.0 * v) + tol;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "step,residual,feasibility_drift,grad_dispersion,rate_ratio\n";
  for (const TraceRecord& r : trace) {
    os << r.step << ',';
    put(os, r.residual);
    os << ',';
    put(os, r.feasibility_drift);
    os << ',';
    put(os, r.grad_dispersion);
    os << ',';
    if (r.rate_ratio) put(os, *r.rate_ratio);
    os << '\n';
  }
}

void write_states_csv(std::ostream& os, const Trace& trace) {
  os << "step,agent,x\n";
  for (const TraceRecord& r : trace) {
    if (!r.state_snapshot) continue;
    for (size_t i = 0; i < r.state_snapshot->size(); ++i) {
      os << r.step << ',' << i << ',';
      put(os, (*r.state_snapshot)[i]);
      os << '\n';
    }
  }
}

}  // namespace dra::analysis
