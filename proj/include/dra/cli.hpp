#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dra/delay.hpp"
#include "dra/graph.hpp"
#include "dra/objective.hpp"
#include "dra/protocol.hpp"
#include "dra/trace.hpp"

namespace dra::cli {

struct DelaySpec {
  bool enabled = false;
  delay::DelayedMode mode = delay::DelayedMode::CaseII;
  int tau_bar = 0;
  delay::AssignmentMode assignment = delay::AssignmentMode::TimeVarying;
  std::uint64_t seed = 0;
};

struct SweepSpec {
  std::vector<double> t_values;
  std::vector<double> p_values;
  std::vector<std::uint64_t> seeds;
  double target_residual = 1e-2;
};

// Flat scenario description; `load_config` fills it from the INI-style file
// documented in the README, presets fill it programmatically.
struct ScenarioConfig {
  // [problem]
  int n = 2;
  double b = 0.0;
  std::string costs = "table2";  // table2 | quadratic | logexp8
  std::uint64_t cost_seed = 1;
  std::vector<double> gamma;  // explicit quadratic coefficients
  std::vector<double> beta;

  // [network]
  std::string network = "er";  // er | cycle | file | spread
  double er_p = 0.2;
  double weight_lo = 0.005;
  double weight_hi = 0.025;
  std::uint64_t net_seed = 1;
  std::string graph_file;
  bool normalize_weights = false;
  bool require_connected = true;
  long window = 1;  // spread: snapshots per period (the B window)
  long dwell = 1;   // steps each snapshot stays active

  // [protocol]
  std::string variant = "node";  // node | link
  std::string nonlinearity = "identity";
  std::string init = "uniform";  // uniform | random
  double step_T = 0.01;
  long max_steps = 10000;
  double termination_residual = 0.0;
  bool record_states = false;

  DelaySpec delay;
  std::optional<SweepSpec> sweep;

  // [output]
  std::string trace_csv;
  std::string states_csv;
  std::string report_path;

  // [run]
  std::uint64_t master_seed = 1;
};

ScenarioConfig parse_config(std::istream& is, const std::string& origin);
ScenarioConfig load_config(const std::string& path);

// Named experiment setups: edp50, edp5-cycle, quantized100.
ScenarioConfig preset(const std::string& name);

// Canonical serialization; hashing it gives the reproducibility fingerprint
// echoed in every report.
std::string serialize_config(const ScenarioConfig& cfg);
std::string config_hash(const ScenarioConfig& cfg);

struct RunReport {
  RunStatus status = RunStatus::MaxSteps;
  double final_residual = 0.0;
  long iterations_to_target = -1;  // -1 when no target was configured or hit
  double t_lambda = 0.0;           // 0 when the sector gives no finite bound
  bool step_respects_bound = false;
  double max_rate = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t master_seed = 0;
  std::string config_hash;
};

struct ScenarioResult {
  RunReport report;
  Trace trace;
  std::vector<double> x_star;
  double f_star = 0.0;
};

// Builders shared by run_scenario and the tests.
objective::Problem build_problem(const ScenarioConfig& cfg);
graph::NetworkSchedule build_schedule(const ScenarioConfig& cfg);
protocol::ProtocolConfig build_protocol(const ScenarioConfig& cfg);

// Oracle solve, then the configured (possibly delayed) run; persists trace /
// states / report when paths are set.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

std::string format_report(const RunReport& r);

struct SweepRow {
  long trial = 0;
  double step_T = 0.0;
  double er_p = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  RunStatus status = RunStatus::MaxSteps;
  long iterations_to_target = -1;
  double final_residual = 0.0;
};

// Cartesian product of (T values x p values x seeds); rows ordered by trial
// index regardless of worker scheduling (DRA_WORKERS caps the thread count).
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg);

// Per-trial rows followed by per-grid-cell mean/std aggregate rows.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace dra::cli
