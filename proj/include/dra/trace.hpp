#pragma once

#include <optional>
#include <vector>

namespace dra {

enum class RunStatus { Converged, MaxSteps, Diverged };

struct TraceRecord {
  long step = 0;
  double residual = 0.0;           // F(x(k)) - F*
  double feasibility_drift = 0.0;  // sum(x) - b
  double grad_dispersion = 0.0;    // max_i df_i - min_i df_i
  std::optional<std::vector<double>> state_snapshot;
  std::optional<double> rate_ratio;  // residual(k) / residual(k-1)
};

using Trace = std::vector<TraceRecord>;

}  // namespace dra
