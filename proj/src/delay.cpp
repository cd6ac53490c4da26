#include "dra/delay.hpp"

#include <algorithm>
#include <cmath>

#include "dra/errors.hpp"
#include "dra/nonlinearity.hpp"
#include "dra/rng.hpp"

namespace dra::delay {

namespace {

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

double pair_term(const protocol::ProtocolConfig& cfg, double gi, double gj) {
  if (cfg.variant == protocol::Variant::NodeBased)
    return nonlinearity::eval(cfg.map, gi - gj);
  return nonlinearity::eval(cfg.map, gi) - nonlinearity::eval(cfg.map, gj);
}

bool diverged(const protocol::AllocationState& state,
              const protocol::ProtocolConfig& cfg, double residual,
              double initial_residual) {
  for (double xi : state.x)
    if (!std::isfinite(xi) || std::abs(xi) > cfg.divergence_state_limit)
      return true;
  return initial_residual > 0.0 &&
         residual > cfg.divergence_residual_factor * initial_residual;
}

}  // namespace

long timescale_map(long k, int tau_bar) {
  if (k < 1) throw InvalidRange("timescale_map requires k >= 1");
  return (k - 1) / (tau_bar + 1) + 1;
}

std::map<Link, int> sample_delays(const DelayModel& dm, long k,
                                  const std::vector<Link>& active_links,
                                  bool delivery_pending) {
  std::map<Link, int> out;
  if (dm.mode == AssignmentMode::FixedPerLink) {
    for (const Link& l : active_links) {
      auto it = dm.fixed.find(l);
      const int tau = it == dm.fixed.end() ? dm.tau_bar : it->second;
      if (tau < 0 || tau > dm.tau_bar)
        throw InvalidRange("fixed link delay outside [0, tau_bar]");
      out[l] = tau;
    }
    return out;
  }
  if (active_links.empty()) return out;
  Rng rng = Rng::seeded(dm.seed).fork(static_cast<std::uint64_t>(k) + 1);
  const std::uint64_t span = static_cast<std::uint64_t>(dm.tau_bar) + 1;
  for (;;) {
    bool lands_now = delivery_pending;
    for (const Link& l : active_links) {
      const int tau = static_cast<int>(rng.uniform_int(span));
      out[l] = tau;
      if (tau == 0) lands_now = true;
    }
    if (lands_now) return out;
  }
}

void validate_delayed_config(const graph::NetworkSchedule& schedule,
                             const DelayedRunConfig& cfg) {
  if (cfg.delay.tau_bar < 0)
    throw ValidationError("tau_bar must be nonnegative");
  if (schedule.snapshots().size() <= 1) return;
  for (const graph::Snapshot& s : schedule.snapshots())
    if (s.duration_steps <= cfg.delay.tau_bar + 1)
      throw ValidationError(
          "switching schedule snapshots must dwell longer than tau_bar+1 "
          "steps");
}

DelayedRunResult run_case_i(const objective::Problem& p,
                            const graph::NetworkSchedule& schedule,
                            const DelayedRunConfig& cfg,
                            const protocol::AllocationState& init,
                            double f_star) {
  validate_delayed_config(schedule, cfg);
  const protocol::ProtocolConfig& base = cfg.base;
  const long block = cfg.delay.tau_bar + 1;

  DelayedRunResult result;
  protocol::AllocationState state = init;
  protocol::refresh_gradients(state, p);
  result.trace.push_back(
      protocol::observe(state, p, f_star, nullptr, base.record_states));
  const double initial_residual = result.trace.front().residual;
  result.status = RunStatus::MaxSteps;

  // Captured at block start: the snapshot and the gradients the packets carry.
  const graph::WeightedGraph* block_graph = nullptr;
  std::vector<double> block_grads;

  for (long k = 0; k < base.max_steps; ++k) {
    const TraceRecord& last = result.trace.back();
    if (base.termination_residual > 0.0 &&
        last.residual <= base.termination_residual) {
      result.status = RunStatus::Converged;
      break;
    }
    if (diverged(state, base, last.residual, initial_residual)) {
      result.status = RunStatus::Diverged;
      break;
    }
    if (k % block == 0) {
      const graph::WeightedGraph& g = schedule.at_step(k);
      if (g.directed())
        throw DirectedGraphRejected("delayed engines require undirected graphs");
      block_graph = &g;
      block_grads = state.grad_cache;
      std::vector<Link> links;
      links.reserve(g.edges().size());
      for (const graph::Edge& e : g.edges()) links.push_back(make_link(e.i, e.j));
      sample_delays(cfg.delay, k, links);  // arrival always inside the block
      result.packets_sent += 2 * static_cast<long>(links.size());
    }
    if (k % block == block - 1 && block_graph) {
      const graph::WeightedGraph& g = *block_graph;
      std::vector<Kahan> delta(state.x.size());
      for (const graph::Edge& e : g.edges()) {
        const double d =
            e.w * pair_term(base, block_grads[static_cast<size_t>(e.i)],
                            block_grads[static_cast<size_t>(e.j)]);
        delta[static_cast<size_t>(e.i)].add(-d);
        delta[static_cast<size_t>(e.j)].add(d);
      }
      for (size_t i = 0; i < state.x.size(); ++i) {
        const double dx = base.step_T * delta[i].sum;
        state.x[i] += dx;
        result.max_rate = std::max(result.max_rate, std::abs(dx) / base.step_T);
      }
      result.packets_consumed += 2 * static_cast<long>(g.edges().size());
      protocol::refresh_gradients(state, p);
    }
    state.step = k + 1;
    result.trace.push_back(protocol::observe(state, p, f_star,
                                             &result.trace.back(),
                                             base.record_states));
  }
  result.packets_in_flight = result.packets_sent - result.packets_consumed;
  if (result.status == RunStatus::MaxSteps &&
      base.termination_residual > 0.0 &&
      result.trace.back().residual <= base.termination_residual)
    result.status = RunStatus::Converged;
  result.final_state = std::move(state);
  return result;
}

namespace {

// One outstanding exchange per unordered link: both endpoint gradients are
// captured at send time together with the link weight, and the pair is
// consumed by both endpoints at the shared arrival step.
struct Exchange {
  bool in_flight = false;
  long sent = 0;
  long arrival = 0;
  double gi = 0.0;
  double gj = 0.0;
  double w = 0.0;
};

}  // namespace

DelayedRunResult run_case_ii(const objective::Problem& p,
                             const graph::NetworkSchedule& schedule,
                             const DelayedRunConfig& cfg,
                             const protocol::AllocationState& init,
                             double f_star) {
  validate_delayed_config(schedule, cfg);
  const protocol::ProtocolConfig& base = cfg.base;
  const int tau_bar = cfg.delay.tau_bar;

  DelayedRunResult result;
  protocol::AllocationState state = init;
  protocol::refresh_gradients(state, p);
  result.trace.push_back(
      protocol::observe(state, p, f_star, nullptr, base.record_states));
  const double initial_residual = result.trace.front().residual;
  result.status = RunStatus::MaxSteps;

  std::map<Link, Exchange> links;

  for (long k = 0; k < base.max_steps; ++k) {
    const TraceRecord& last = result.trace.back();
    if (base.termination_residual > 0.0 &&
        last.residual <= base.termination_residual) {
      result.status = RunStatus::Converged;
      break;
    }
    if (diverged(state, base, last.residual, initial_residual)) {
      result.status = RunStatus::Diverged;
      break;
    }

    const graph::WeightedGraph& g = schedule.at_step(k);
    if (g.directed())
      throw DirectedGraphRejected("delayed engines require undirected graphs");

    // New exchanges on idle active links. Assumption: if nothing else lands
    // this step, the fresh draw must put at least one packet down now.
    bool delivery_pending = false;
    for (const auto& [link, ex] : links)
      if (ex.in_flight && ex.arrival == k) delivery_pending = true;
    std::vector<Link> fresh;
    for (const graph::Edge& e : g.edges()) {
      const Link l = make_link(e.i, e.j);
      auto it = links.find(l);
      if (it == links.end() || !it->second.in_flight) fresh.push_back(l);
    }
    if (!fresh.empty()) {
      const std::map<Link, int> taus =
          sample_delays(cfg.delay, k, fresh, delivery_pending);
      for (const graph::Edge& e : g.edges()) {
        const Link l = make_link(e.i, e.j);
        auto it = taus.find(l);
        if (it == taus.end()) continue;
        Exchange& ex = links[l];
        ex.in_flight = true;
        ex.sent = k;
        ex.arrival = k + it->second;
        ex.gi = state.grad_cache[static_cast<size_t>(l.first)];
        ex.gj = state.grad_cache[static_cast<size_t>(l.second)];
        ex.w = e.w;
        result.packets_sent += 2;
      }
    }

    // Consume everything arriving now, current-snapshot links first in edge
    // order, then any leftovers from earlier snapshots in key order.
    std::vector<Kahan> delta(state.x.size());
    auto consume = [&](const Link& l, Exchange& ex) {
      if (k - ex.sent > tau_bar)
        throw HistoryUnderflow("packet older than tau_bar arrived");
      const double d = ex.w * pair_term(base, ex.gi, ex.gj);
      delta[static_cast<size_t>(l.first)].add(-d);
      delta[static_cast<size_t>(l.second)].add(d);
      ex.in_flight = false;
      result.packets_consumed += 2;
    };
    for (const graph::Edge& e : g.edges()) {
      const Link l = make_link(e.i, e.j);
      auto it = links.find(l);
      if (it != links.end() && it->second.in_flight && it->second.arrival == k)
        consume(l, it->second);
    }
    for (auto& [link, ex] : links)
      if (ex.in_flight && ex.arrival == k) consume(link, ex);

    for (size_t i = 0; i < state.x.size(); ++i) {
      const double dx = base.step_T * delta[i].sum;
      state.x[i] += dx;
      result.max_rate = std::max(result.max_rate, std::abs(dx) / base.step_T);
    }
    protocol::refresh_gradients(state, p);
    state.step = k + 1;
    result.trace.push_back(protocol::observe(state, p, f_star,
                                             &result.trace.back(),
                                             base.record_states));
  }
  for (const auto& [link, ex] : links)
    if (ex.in_flight) result.packets_in_flight += 2;
  if (result.packets_sent - result.packets_consumed !=
      result.packets_in_flight)
    throw Error("packet accounting mismatch");
  if (result.status == RunStatus::MaxSteps &&
      base.termination_residual > 0.0 &&
      result.trace.back().residual <= base.termination_residual)
    result.status = RunStatus::Converged;
  result.final_state = std::move(state);
  return result;
}

}  // namespace dra::delay
