#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "dra/graph.hpp"
#include "dra/objective.hpp"
#include "dra/protocol.hpp"
#include "dra/trace.hpp"

namespace dra::delay {

// Unordered link key, normalized to first < second.
using Link = std::pair<int, int>;

inline Link make_link(int i, int j) {
  return i < j ? Link{i, j} : Link{j, i};
}

enum class AssignmentMode { FixedPerLink, TimeVarying };

// Symmetric bounded integer link delays: tau_ij = tau_ji <= tau_bar.
struct DelayModel {
  int tau_bar = 0;
  AssignmentMode mode = AssignmentMode::TimeVarying;
  std::uint64_t seed = 0;
  // FixedPerLink assignment; links absent from the table default to tau_bar,
  // so an empty table means a homogeneous fixed delay of tau_bar.
  std::map<Link, int> fixed;
};

enum class DelayedMode { CaseI, CaseII };

struct DelayedRunConfig {
  DelayedMode mode = DelayedMode::CaseII;
  protocol::ProtocolConfig base;
  DelayModel delay;
};

// Slow-step index for the longer-time-scale engine: agents exchange once per
// block of tau_bar+1 fast steps.
long timescale_map(long k, int tau_bar);

// Per-link symmetric delays for packets sent at fast step k. Deterministic in
// (seed, k). When `delivery_pending` is false the draw is repeated until at
// least one link gets delay 0, so some packet still lands this step.
std::map<Link, int> sample_delays(const DelayModel& dm, long k,
                                  const std::vector<Link>& active_links,
                                  bool delivery_pending = true);

struct DelayedRunResult {
  Trace trace;  // indexed by fast step
  RunStatus status = RunStatus::MaxSteps;
  protocol::AllocationState final_state;
  double max_rate = 0.0;
  long packets_sent = 0;
  long packets_consumed = 0;
  long packets_in_flight = 0;  // at run end
  long packets_discarded = 0;  // late duplicates within a slow step (Case I)
};

// Rejects switching schedules whose snapshot dwell time is not longer than
// tau_bar+1 steps; a packet must never straddle a topology change.
void validate_delayed_config(const graph::NetworkSchedule& schedule,
                             const DelayedRunConfig& cfg);

// Longer time-scale engine: one exchange and one update per block of
// tau_bar+1 fast steps; states are piecewise-constant in between.
DelayedRunResult run_case_i(const objective::Problem& p,
                            const graph::NetworkSchedule& schedule,
                            const DelayedRunConfig& cfg,
                            const protocol::AllocationState& init,
                            double f_star);

// Same time-scale engine: every fast step applies all packets arriving at
// that step, each matched against the sender-time gradient history. Both
// endpoints of a link consume the shared pair at the same step, keeping the
// update anti-symmetric.
DelayedRunResult run_case_ii(const objective::Problem& p,
                             const graph::NetworkSchedule& schedule,
                             const DelayedRunConfig& cfg,
                             const protocol::AllocationState& init,
                             double f_star);

}  // namespace dra::delay
