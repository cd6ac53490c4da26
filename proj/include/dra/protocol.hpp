#pragma once

#include <cstdint>
#include <vector>

#include "dra/graph.hpp"
#include "dra/nonlinearity.hpp"
#include "dra/objective.hpp"
#include "dra/trace.hpp"

namespace dra::protocol {

enum class Variant { NodeBased, LinkBased };

struct ProtocolConfig {
  Variant variant = Variant::NodeBased;
  double step_T = 0.01;
  nonlinearity::NonlinearMap map = nonlinearity::NonlinearMap::identity();
  long max_steps = 10000;
  double termination_residual = 0.0;
  bool record_states = false;
  double divergence_state_limit = 1e12;
  double divergence_residual_factor = 1e6;
};

struct AllocationState {
  std::vector<double> x;
  long step = 0;
  std::vector<double> grad_cache;
};

enum class InitMode { Uniform, RandomFeasible };

AllocationState feasible_init(const objective::Problem& p, InitMode mode,
                              std::uint64_t seed = 0);

// x_i <- x_i - T sum_j W_ij g(df_i - df_j); undirected graphs only.
void step_node_based(AllocationState& state, const objective::Problem& p,
                     const graph::WeightedGraph& g, const ProtocolConfig& cfg);

// x_i <- x_i - T sum_j W_ij (g(df_i) - g(df_j)); undirected or
// weight-balanced directed graphs.
void step_link_based(AllocationState& state, const objective::Problem& p,
                     const graph::WeightedGraph& g, const ProtocolConfig& cfg);

struct RunResult {
  Trace trace;
  RunStatus status = RunStatus::MaxSteps;
  AllocationState final_state;
  // Largest per-agent per-step rate |dx_i| / T seen over the whole run.
  double max_rate = 0.0;
};

// Iterates the configured step over the schedule until max_steps or the
// residual target. f_star anchors the residual column (pass the oracle's
// optimal value); connectivity of the schedule is the caller's business.
RunResult run(const objective::Problem& p, const graph::NetworkSchedule& schedule,
              const ProtocolConfig& cfg, const AllocationState& init,
              double f_star);

// Convenience metrics.
double feasibility_drift(const std::vector<double>& x, double b);
double gradient_dispersion(const objective::Problem& p,
                           const std::vector<double>& x);

// Recompute the per-agent gradient cache at the current state.
void refresh_gradients(AllocationState& state, const objective::Problem& p);

// Build the trace row for the current state; `prev` feeds the rate ratio.
TraceRecord observe(const AllocationState& state, const objective::Problem& p,
                    double f_star, const TraceRecord* prev, bool record_states);

}  // namespace dra::protocol
