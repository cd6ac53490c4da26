#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dra/analysis.hpp"
#include "dra/cli.hpp"
#include "dra/errors.hpp"
#include "dra/graph.hpp"
#include "dra/nonlinearity.hpp"
#include "dra/objective.hpp"
#include "dra/oracle.hpp"

namespace {

dra::cli::ScenarioConfig resolve(const std::string& config_path,
                                 const std::string& preset_name) {
  if (!preset_name.empty()) return dra::cli::preset(preset_name);
  return dra::cli::load_config(config_path);
}

int cmd_solve(const dra::cli::ScenarioConfig& cfg) {
  const dra::cli::ScenarioResult res = dra::cli::run_scenario(cfg);
  std::cout << dra::cli::format_report(res.report);
  return res.report.status == dra::RunStatus::Diverged ? 3 : 0;
}

int cmd_sweep(const dra::cli::ScenarioConfig& cfg) {
  const std::vector<dra::cli::SweepRow> rows = dra::cli::run_sweep(cfg);
  if (!cfg.trace_csv.empty()) {
    std::ofstream f(cfg.trace_csv);
    if (!f) throw dra::Error("cannot write sweep CSV: " + cfg.trace_csv);
    dra::cli::write_sweep_csv(f, rows);
  } else {
    dra::cli::write_sweep_csv(std::cout, rows);
  }
  for (const dra::cli::SweepRow& r : rows)
    if (r.status == dra::RunStatus::Diverged) return 3;
  return 0;
}

int cmd_check_bound(const dra::cli::ScenarioConfig& cfg) {
  const dra::objective::Problem p = dra::cli::build_problem(cfg);
  const dra::graph::NetworkSchedule schedule = dra::cli::build_schedule(cfg);
  const dra::nonlinearity::NonlinearMap map =
      dra::nonlinearity::parse_expression(cfg.nonlinearity);
  const dra::nonlinearity::Sector& sec = map.sector();
  const double share = p.b / p.n();
  const double span = std::abs(share) + std::abs(p.b) + 1.0;
  double u = 0.0;
  for (const auto& c : p.costs)
    u = std::max(u, dra::objective::curvature_bounds(c, share - span,
                                                     share + span)
                        .second);
  const dra::graph::SpectralSummary spec =
      dra::graph::spectral_summary(schedule.union_graph());
  std::cout << "epsilon = " << sec.epsilon << "\nK_g = " << sec.k_g
            << "\nu = " << u << "\nlambda2 = " << spec.lambda2
            << "\nlambdaN = " << spec.lambda_n << "\n";
  if (sec.epsilon > 0.0 && std::isfinite(sec.k_g)) {
    const dra::analysis::StepBoundReport r =
        dra::analysis::compute_step_bound(sec.epsilon, sec.k_g, u, spec);
    std::cout << "T_lambda = " << r.t_lambda << "\nT = " << cfg.step_T
              << "\nrespects_bound = " << (cfg.step_T < r.t_lambda ? 1 : 0)
              << "\n";
  } else {
    std::cout << "T_lambda = none (sector gives no finite bound)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed resource allocation simulator"};
  app.require_subcommand(1);

  std::string config_path, preset_name;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Scenario config file");
    sub->add_option("--preset", preset_name,
                    "Named preset (edp50, edp5-cycle, quantized100)");
  };
  CLI::App* solve = app.add_subcommand("solve", "Run one scenario");
  CLI::App* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo sweep");
  CLI::App* check = app.add_subcommand("check-bound", "Print the step bound");
  CLI::App* validate = app.add_subcommand("validate", "Validate a config");
  for (CLI::App* sub : {solve, sweep, check, validate}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (config_path.empty() && preset_name.empty()) {
      std::cerr << "error: provide a config file or --preset\n";
      return 2;
    }
    const dra::cli::ScenarioConfig cfg = resolve(config_path, preset_name);
    if (validate->parsed()) {
      std::cout << "ok " << dra::cli::config_hash(cfg) << "\n";
      return 0;
    }
    if (solve->parsed()) return cmd_solve(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (check->parsed()) return cmd_check_bound(cfg);
  } catch (const dra::ParseError& e) {
    std::cerr << "parse error: " << e.what();
    return 2;
  } catch (const dra::ValidationError& e) {
    std::cerr << "validation error: " << e.what();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
