#include "dra/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "dra/rng.hpp"

namespace dra::protocol {

namespace {

// Compensated accumulator; keeps the sum-preserving update from drifting over
// long runs.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void refresh_gradients(AllocationState& state, const objective::Problem& p) {
  state.grad_cache.resize(state.x.size());
  for (size_t i = 0; i < state.x.size(); ++i)
    state.grad_cache[i] = objective::gradient(p.costs[i], state.x[i]);
}

AllocationState feasible_init(const objective::Problem& p, InitMode mode,
                              std::uint64_t seed) {
  const int n = p.n();
  AllocationState state;
  state.x.assign(static_cast<size_t>(n), 0.0);
  if (mode == InitMode::Uniform) {
    const double share = p.b / n;
    std::fill(state.x.begin(), state.x.end(), share);
  } else {
    Rng rng = Rng::seeded(seed);
    for (double& xi : state.x) xi = rng.uniform01();
    // project onto the constraint plane, then sweep the rounding residue
    Kahan total;
    for (double xi : state.x) total.add(xi);
    const double offset = (total.sum - p.b) / n;
    for (double& xi : state.x) xi -= offset;
    Kahan check;
    for (double xi : state.x) check.add(xi);
    state.x[0] -= check.sum - p.b;
  }
  state.step = 0;
  refresh_gradients(state, p);
  return state;
}

namespace {

// Shared edge-paired update: `term(i, j)` returns the anti-symmetric quantity
// for the unordered pair; applying +/- the identical product keeps sum(x)
// conserved to rounding.
template <typename Term>
void apply_undirected(AllocationState& state, const objective::Problem& p,
                      const graph::WeightedGraph& g, double T, Term term) {
  const int n = g.n();
  std::vector<Kahan> delta(static_cast<size_t>(n));
  for (const graph::Edge& e : g.edges()) {
    const double d = e.w * term(e.i, e.j);
    delta[static_cast<size_t>(e.i)].add(-d);
    delta[static_cast<size_t>(e.j)].add(d);
  }
  for (int i = 0; i < n; ++i) state.x[static_cast<size_t>(i)] += T * delta[static_cast<size_t>(i)].sum;
  state.step += 1;
  refresh_gradients(state, p);
}

}  // namespace

void step_node_based(AllocationState& state, const objective::Problem& p,
                     const graph::WeightedGraph& g, const ProtocolConfig& cfg) {
  if (g.directed())
    throw DirectedGraphRejected(
        "node-based protocol requires an undirected graph");
  const auto& grad = state.grad_cache;
  apply_undirected(state, p, g, cfg.step_T, [&](int i, int j) {
    return nonlinearity::eval(cfg.map, grad[static_cast<size_t>(i)] -
                                           grad[static_cast<size_t>(j)]);
  });
}

void step_link_based(AllocationState& state, const objective::Problem& p,
                     const graph::WeightedGraph& g, const ProtocolConfig& cfg) {
  const auto& grad = state.grad_cache;
  if (!g.directed()) {
    apply_undirected(state, p, g, cfg.step_T, [&](int i, int j) {
      return nonlinearity::eval(cfg.map, grad[static_cast<size_t>(i)]) -
             nonlinearity::eval(cfg.map, grad[static_cast<size_t>(j)]);
    });
    return;
  }
  if (!graph::is_weight_balanced(g))
    throw DirectedUnbalanced(
        "link-based protocol on a digraph requires weight balance");
  const int n = g.n();
  std::vector<double> gv(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    gv[static_cast<size_t>(i)] =
        nonlinearity::eval(cfg.map, grad[static_cast<size_t>(i)]);
  std::vector<Kahan> delta(static_cast<size_t>(n));
  for (const graph::Edge& e : g.edges())
    delta[static_cast<size_t>(e.i)].add(
        -e.w * (gv[static_cast<size_t>(e.i)] - gv[static_cast<size_t>(e.j)]));
  for (int i = 0; i < n; ++i)
    state.x[static_cast<size_t>(i)] += cfg.step_T * delta[static_cast<size_t>(i)].sum;
  state.step += 1;
  refresh_gradients(state, p);
}

double feasibility_drift(const std::vector<double>& x, double b) {
  Kahan total;
  for (double xi : x) total.add(xi);
  return total.sum - b;
}

double gradient_dispersion(const objective::Problem& p,
                           const std::vector<double>& x) {
  double lo = objective::gradient(p.costs[0], x[0]);
  double hi = lo;
  for (size_t i = 1; i < x.size(); ++i) {
    const double g = objective::gradient(p.costs[i], x[i]);
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return hi - lo;
}

TraceRecord observe(const AllocationState& state,
                    const objective::Problem& p, double f_star,
                    const TraceRecord* prev, bool record_states) {
  TraceRecord r;
  r.step = state.step;
  r.residual = objective::global_cost(p, state.x) - f_star;
  r.feasibility_drift = feasibility_drift(state.x, p.b);
  double lo = state.grad_cache[0], hi = state.grad_cache[0];
  for (double g : state.grad_cache) {
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  r.grad_dispersion = hi - lo;
  if (prev && prev->residual > 1e-12)
    r.rate_ratio = r.residual / prev->residual;
  if (record_states) r.state_snapshot = state.x;
  return r;
}

RunResult run(const objective::Problem& p, const graph::NetworkSchedule& schedule,
              const ProtocolConfig& cfg, const AllocationState& init,
              double f_star) {
  RunResult result;
  AllocationState state = init;
  refresh_gradients(state, p);
  result.trace.push_back(observe(state, p, f_star, nullptr, cfg.record_states));
  const double initial_residual = result.trace.front().residual;
  result.status = RunStatus::MaxSteps;
  for (long k = 0; k < cfg.max_steps; ++k) {
    const TraceRecord& last = result.trace.back();
    if (cfg.termination_residual > 0.0 &&
        last.residual <= cfg.termination_residual) {
      result.status = RunStatus::Converged;
      break;
    }
    bool blown = false;
    for (double xi : state.x)
      if (!std::isfinite(xi) || std::abs(xi) > cfg.divergence_state_limit)
        blown = true;
    if (blown || (initial_residual > 0.0 &&
                  last.residual >
                      cfg.divergence_residual_factor * initial_residual)) {
      result.status = RunStatus::Diverged;
      break;
    }
    const std::vector<double> before = state.x;
    const graph::WeightedGraph& g = schedule.at_step(k);
    if (cfg.variant == Variant::NodeBased)
      step_node_based(state, p, g, cfg);
    else
      step_link_based(state, p, g, cfg);
    for (size_t i = 0; i < state.x.size(); ++i)
      result.max_rate = std::max(
          result.max_rate, std::abs(state.x[i] - before[i]) / cfg.step_T);
    result.trace.push_back(
        observe(state, p, f_star, &result.trace.back(), cfg.record_states));
  }
  if (result.status == RunStatus::MaxSteps && cfg.termination_residual > 0.0 &&
      result.trace.back().residual <= cfg.termination_residual)
    result.status = RunStatus::Converged;
  result.final_state = std::move(state);
  return result;
}

}  // namespace dra::protocol
