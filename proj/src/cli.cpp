#include "dra/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <thread>

#include "dra/analysis.hpp"
#include "dra/errors.hpp"
#include "dra/nonlinearity.hpp"
#include "dra/oracle.hpp"
#include "dra/rng.hpp"

namespace dra::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Builder {
 public:
  Builder(const std::string& origin) : origin_(origin) {}

  void fail(int line, const std::string& msg) {
    std::ostringstream os;
    os << origin_ << ":" << line << ": " << msg;
    errors_.push_back(os.str());
  }
  void fail(const std::string& msg) { errors_.push_back(origin_ + ": " + msg); }

  double num(const Entry& e) {
    try {
      size_t pos = 0;
      double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail(e.line, "expected a number for '" + e.key + "', got '" + e.value + "'");
      return 0.0;
    }
  }
  long integer(const Entry& e) {
    const double v = num(e);
    if (v != std::floor(v)) fail(e.line, "expected an integer for '" + e.key + "'");
    return static_cast<long>(v);
  }
  std::uint64_t seed(const Entry& e) {
    const long v = integer(e);
    if (v < 0) fail(e.line, "seeds must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  bool flag(const Entry& e) {
    if (e.value == "1" || e.value == "true") return true;
    if (e.value == "0" || e.value == "false") return false;
    fail(e.line, "expected 0/1 for '" + e.key + "'");
    return false;
  }
  std::vector<double> num_list(const Entry& e) {
    std::vector<double> out;
    for (const std::string& s : split_list(e.value)) {
      try {
        out.push_back(std::stod(s));
      } catch (const std::exception&) {
        fail(e.line, "bad numeric list element '" + s + "'");
      }
    }
    if (out.empty()) fail(e.line, "'" + e.key + "' list is empty");
    return out;
  }
  std::vector<std::uint64_t> seed_list(const Entry& e) {
    std::vector<std::uint64_t> out;
    for (double v : num_list(e)) out.push_back(static_cast<std::uint64_t>(v));
    return out;
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::string origin_;
  std::vector<std::string> errors_;
};

}  // namespace

ScenarioConfig parse_config(std::istream& is, const std::string& origin) {
  std::vector<Entry> entries;
  std::vector<std::string> structural;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    // Inline comments: a '#' preceded by whitespace starts a comment.
    for (size_t i = 1; i < t.size(); ++i) {
      if (t[i] == '#' && std::isspace(static_cast<unsigned char>(t[i - 1]))) {
        t = trim(t.substr(0, i));
        break;
      }
    }
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        structural.push_back(origin + ":" + std::to_string(lineno) +
                             ": malformed section header");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      structural.push_back(origin + ":" + std::to_string(lineno) +
                           ": expected 'key = value'");
      continue;
    }
    if (section.empty()) {
      structural.push_back(origin + ":" + std::to_string(lineno) +
                           ": key outside any [section]");
      continue;
    }
    entries.push_back({section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)),
                       lineno});
  }
  if (!structural.empty()) {
    std::string joined;
    for (const std::string& s : structural) joined += s + "\n";
    throw ParseError(joined);
  }

  ScenarioConfig cfg;
  Builder b(origin);
  bool have_sweep = false;
  SweepSpec sweep;
  bool saw_b = false;

  for (const Entry& e : entries) {
    const std::string id = e.section + "." + e.key;
    if (id == "problem.n") cfg.n = static_cast<int>(b.integer(e));
    else if (id == "problem.b") { cfg.b = b.num(e); saw_b = true; }
    else if (id == "problem.costs") cfg.costs = e.value;
    else if (id == "problem.seed") cfg.cost_seed = b.seed(e);
    else if (id == "problem.gamma") cfg.gamma = b.num_list(e);
    else if (id == "problem.beta") cfg.beta = b.num_list(e);
    else if (id == "network.kind") cfg.network = e.value;
    else if (id == "network.p") cfg.er_p = b.num(e);
    else if (id == "network.weight_lo") cfg.weight_lo = b.num(e);
    else if (id == "network.weight_hi") cfg.weight_hi = b.num(e);
    else if (id == "network.seed") cfg.net_seed = b.seed(e);
    else if (id == "network.file") cfg.graph_file = e.value;
    else if (id == "network.normalize") cfg.normalize_weights = b.flag(e);
    else if (id == "network.require_connected") cfg.require_connected = b.flag(e);
    else if (id == "network.window") cfg.window = b.integer(e);
    else if (id == "network.dwell") cfg.dwell = b.integer(e);
    else if (id == "protocol.variant") cfg.variant = e.value;
    else if (id == "protocol.nonlinearity") cfg.nonlinearity = e.value;
    else if (id == "protocol.init") cfg.init = e.value;
    else if (id == "protocol.T") cfg.step_T = b.num(e);
    else if (id == "protocol.max_steps") cfg.max_steps = b.integer(e);
    else if (id == "protocol.termination_residual") cfg.termination_residual = b.num(e);
    else if (id == "protocol.record_states") cfg.record_states = b.flag(e);
    else if (id == "delay.case") {
      cfg.delay.enabled = true;
      if (e.value == "i") cfg.delay.mode = delay::DelayedMode::CaseI;
      else if (e.value == "ii") cfg.delay.mode = delay::DelayedMode::CaseII;
      else b.fail(e.line, "delay.case must be 'i' or 'ii'");
    }
    else if (id == "delay.tau_bar") { cfg.delay.enabled = true; cfg.delay.tau_bar = static_cast<int>(b.integer(e)); }
    else if (id == "delay.mode") {
      if (e.value == "varying") cfg.delay.assignment = delay::AssignmentMode::TimeVarying;
      else if (e.value == "fixed") cfg.delay.assignment = delay::AssignmentMode::FixedPerLink;
      else b.fail(e.line, "delay.mode must be 'varying' or 'fixed'");
    }
    else if (id == "delay.seed") cfg.delay.seed = b.seed(e);
    else if (id == "sweep.T") { have_sweep = true; sweep.t_values = b.num_list(e); }
    else if (id == "sweep.p") { have_sweep = true; sweep.p_values = b.num_list(e); }
    else if (id == "sweep.seeds") { have_sweep = true; sweep.seeds = b.seed_list(e); }
    else if (id == "sweep.target_residual") { have_sweep = true; sweep.target_residual = b.num(e); }
    else if (id == "output.trace") cfg.trace_csv = e.value;
    else if (id == "output.states") cfg.states_csv = e.value;
    else if (id == "output.report") cfg.report_path = e.value;
    else if (id == "run.master_seed") cfg.master_seed = b.seed(e);
    else b.fail(e.line, "unknown setting '" + id + "'");
  }
  if (have_sweep) cfg.sweep = sweep;

  // Cross-field validation.
  if (cfg.n < 2) b.fail("problem.n must be at least 2");
  if (!saw_b) b.fail("problem.b is required");
  if (cfg.costs != "table2" && cfg.costs != "quadratic" && cfg.costs != "logexp8")
    b.fail("problem.costs must be table2, quadratic, or logexp8");
  if (cfg.costs == "quadratic") {
    if (cfg.gamma.size() != static_cast<size_t>(cfg.n) ||
        cfg.beta.size() != static_cast<size_t>(cfg.n))
      b.fail("quadratic costs need gamma and beta lists of length n");
    for (double g : cfg.gamma)
      if (!(g > 0.0)) b.fail("quadratic gamma coefficients must be positive");
  }
  if (cfg.network != "er" && cfg.network != "cycle" && cfg.network != "file" &&
      cfg.network != "spread")
    b.fail("network.kind must be er, cycle, file, or spread");
  if (cfg.network == "er" || cfg.network == "spread") {
    if (!(cfg.er_p > 0.0 && cfg.er_p <= 1.0)) b.fail("network.p must be in (0, 1]");
    if (!(cfg.weight_lo > 0.0) || cfg.weight_hi < cfg.weight_lo)
      b.fail("network weights need 0 < weight_lo <= weight_hi");
  }
  if (cfg.network == "file" && cfg.graph_file.empty())
    b.fail("network.kind=file requires network.file");
  if (cfg.window < 1) b.fail("network.window must be >= 1");
  if (cfg.dwell < 1) b.fail("network.dwell must be >= 1");
  if (cfg.variant != "node" && cfg.variant != "link")
    b.fail("protocol.variant must be node or link");
  if (cfg.init != "uniform" && cfg.init != "random")
    b.fail("protocol.init must be uniform or random");
  if (!(cfg.step_T > 0.0)) b.fail("protocol.T must be positive");
  if (cfg.max_steps < 0) b.fail("protocol.max_steps must be nonnegative");
  if (cfg.termination_residual < 0.0)
    b.fail("protocol.termination_residual must be nonnegative");
  try {
    nonlinearity::parse_expression(cfg.nonlinearity);
  } catch (const Error& err) {
    b.fail(std::string("protocol.nonlinearity: ") + err.what());
  }
  if (cfg.delay.enabled) {
    if (cfg.delay.tau_bar < 0) b.fail("delay.tau_bar must be nonnegative");
    if (cfg.network == "spread" && cfg.window > 1 &&
        cfg.dwell <= cfg.delay.tau_bar + 1)
      b.fail("switching snapshots must dwell longer than tau_bar+1 steps");
  }
  if (cfg.sweep) {
    if (cfg.sweep->seeds.empty()) b.fail("sweep.seeds must be non-empty");
    if (!(cfg.sweep->target_residual > 0.0))
      b.fail("sweep.target_residual must be positive");
    for (double t : cfg.sweep->t_values)
      if (!(t > 0.0)) b.fail("sweep.T values must be positive");
  }

  if (!b.errors().empty()) {
    std::string joined;
    for (const std::string& s : b.errors()) joined += s + "\n";
    throw ValidationError(joined);
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config file: " + path);
  return parse_config(f, path);
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[problem]\nn = " << c.n << "\nb = " << fmt(c.b)
     << "\ncosts = " << c.costs << "\nseed = " << c.cost_seed << "\n";
  if (!c.gamma.empty()) {
    os << "gamma = ";
    for (size_t i = 0; i < c.gamma.size(); ++i)
      os << (i ? "," : "") << fmt(c.gamma[i]);
    os << "\nbeta = ";
    for (size_t i = 0; i < c.beta.size(); ++i)
      os << (i ? "," : "") << fmt(c.beta[i]);
    os << "\n";
  }
  os << "[network]\nkind = " << c.network << "\np = " << fmt(c.er_p)
     << "\nweight_lo = " << fmt(c.weight_lo)
     << "\nweight_hi = " << fmt(c.weight_hi) << "\nseed = " << c.net_seed
     << "\nnormalize = " << (c.normalize_weights ? 1 : 0)
     << "\nrequire_connected = " << (c.require_connected ? 1 : 0)
     << "\nwindow = " << c.window << "\ndwell = " << c.dwell << "\n";
  if (!c.graph_file.empty()) os << "file = " << c.graph_file << "\n";
  os << "[protocol]\nvariant = " << c.variant
     << "\nnonlinearity = " << c.nonlinearity << "\ninit = " << c.init
     << "\nT = " << fmt(c.step_T) << "\nmax_steps = " << c.max_steps
     << "\ntermination_residual = " << fmt(c.termination_residual)
     << "\nrecord_states = " << (c.record_states ? 1 : 0) << "\n";
  if (c.delay.enabled) {
    os << "[delay]\ncase = "
       << (c.delay.mode == delay::DelayedMode::CaseI ? "i" : "ii")
       << "\ntau_bar = " << c.delay.tau_bar << "\nmode = "
       << (c.delay.assignment == delay::AssignmentMode::TimeVarying ? "varying"
                                                                    : "fixed")
       << "\nseed = " << c.delay.seed << "\n";
  }
  if (c.sweep) {
    os << "[sweep]\n";
    if (!c.sweep->t_values.empty()) {
      os << "T = ";
      for (size_t i = 0; i < c.sweep->t_values.size(); ++i)
        os << (i ? "," : "") << fmt(c.sweep->t_values[i]);
      os << "\n";
    }
    if (!c.sweep->p_values.empty()) {
      os << "p = ";
      for (size_t i = 0; i < c.sweep->p_values.size(); ++i)
        os << (i ? "," : "") << fmt(c.sweep->p_values[i]);
      os << "\n";
    }
    os << "seeds = ";
    for (size_t i = 0; i < c.sweep->seeds.size(); ++i)
      os << (i ? "," : "") << c.sweep->seeds[i];
    os << "\ntarget_residual = " << fmt(c.sweep->target_residual) << "\n";
  }
  os << "[run]\nmaster_seed = " << c.master_seed << "\n";
  return os.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

objective::Problem build_problem(const ScenarioConfig& cfg) {
  std::vector<objective::CostModel> costs;
  costs.reserve(static_cast<size_t>(cfg.n));
  if (cfg.costs == "table2") {
    Rng rng = Rng::seeded(cfg.master_seed).fork(cfg.cost_seed);
    const auto& presets = objective::generator_presets();
    for (int i = 0; i < cfg.n; ++i) {
      const size_t t = rng.uniform_int(presets.size());
      costs.emplace_back(objective::generator_cost(presets[t].type));
    }
  } else if (cfg.costs == "quadratic") {
    for (int i = 0; i < cfg.n; ++i)
      costs.emplace_back(objective::Quadratic{cfg.gamma[static_cast<size_t>(i)],
                                              cfg.beta[static_cast<size_t>(i)],
                                              0.0});
  } else if (cfg.costs == "logexp8") {
    Rng rng = Rng::seeded(cfg.master_seed).fork(cfg.cost_seed);
    for (int i = 0; i < cfg.n; ++i) {
      objective::LogExp c;
      do {
        c.alpha = rng.uniform(0.0, 0.2);
      } while (c.alpha < 0.01);  // keep strong convexity away from 0
      c.beta = rng.uniform(-0.2, 0.2);
      c.gamma = rng.uniform(-0.3, 0.3);
      c.eta = rng.uniform(0.0, 0.6);
      c.zeta = 0.2;
      costs.emplace_back(c);
    }
  } else {
    throw ValidationError("unknown cost family: " + cfg.costs);
  }
  return objective::Problem(std::move(costs), cfg.b);
}

namespace {

graph::WeightedGraph connected_er(const ScenarioConfig& cfg) {
  Rng base = Rng::seeded(cfg.master_seed).fork(cfg.net_seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::uint64_t s = base.next_u64();
    graph::WeightedGraph g = graph::generate_erdos_renyi(
        cfg.n, cfg.er_p, cfg.weight_lo, cfg.weight_hi, s);
    if (!cfg.require_connected || graph::is_connected(g)) return g;
  }
  throw ValidationError("could not draw a connected ER graph in 1000 tries");
}

}  // namespace

graph::NetworkSchedule build_schedule(const ScenarioConfig& cfg) {
  if (cfg.network == "cycle") {
    graph::WeightedGraph g(cfg.n, false);
    for (int i = 0; i < cfg.n; ++i) g.add_edge(i, (i + 1) % cfg.n, 1.0);
    if (cfg.normalize_weights) g = graph::normalize_incident_weights(g);
    return graph::NetworkSchedule::single(std::move(g));
  }
  if (cfg.network == "file") {
    graph::WeightedGraph g = graph::read_graph_file(cfg.graph_file);
    if (cfg.normalize_weights) g = graph::normalize_incident_weights(g);
    return graph::NetworkSchedule::single(std::move(g));
  }
  if (cfg.network == "er") {
    graph::WeightedGraph g = connected_er(cfg);
    if (cfg.normalize_weights) g = graph::normalize_incident_weights(g);
    return graph::NetworkSchedule::single(std::move(g));
  }
  if (cfg.network == "spread") {
    graph::WeightedGraph u = connected_er(cfg);
    if (cfg.normalize_weights) u = graph::normalize_incident_weights(u);
    std::vector<graph::Snapshot> snaps(static_cast<size_t>(cfg.window));
    for (size_t s = 0; s < snaps.size(); ++s) {
      snaps[s].duration_steps = cfg.dwell;
      snaps[s].graph = graph::WeightedGraph(cfg.n, false);
    }
    const auto& edges = u.edges();
    for (size_t e = 0; e < edges.size(); ++e)
      snaps[e % snaps.size()].graph.add_edge(edges[e].i, edges[e].j,
                                             edges[e].w);
    return graph::NetworkSchedule(std::move(snaps),
                                  cfg.window * cfg.dwell);
  }
  throw ValidationError("unknown network kind: " + cfg.network);
}

protocol::ProtocolConfig build_protocol(const ScenarioConfig& cfg) {
  protocol::ProtocolConfig p;
  p.variant = cfg.variant == "link" ? protocol::Variant::LinkBased
                                    : protocol::Variant::NodeBased;
  p.map = nonlinearity::parse_expression(cfg.nonlinearity);
  p.step_T = cfg.step_T;
  p.max_steps = cfg.max_steps;
  p.termination_residual = cfg.termination_residual;
  p.record_states = cfg.record_states;
  return p;
}

namespace {

// Advisory T_lambda from the map's declared sector and the problem curvature
// over a generous allocation range.
double advisory_t_lambda(const objective::Problem& p,
                         const nonlinearity::NonlinearMap& map,
                         const graph::NetworkSchedule& schedule) {
  const nonlinearity::Sector& sec = map.sector();
  if (!(sec.epsilon > 0.0) || !std::isfinite(sec.k_g)) return 0.0;
  const double share = p.b / p.n();
  const double span = std::abs(share) + std::abs(p.b) + 1.0;
  double u = 0.0;
  for (const auto& c : p.costs)
    u = std::max(u, objective::curvature_bounds(c, share - span, share + span)
                        .second);
  if (!(u > 0.0)) return 0.0;
  try {
    const graph::SpectralSummary spec =
        graph::spectral_summary(schedule.union_graph());
    return analysis::compute_step_bound(sec.epsilon, sec.k_g, u, spec).t_lambda;
  } catch (const Error&) {
    return 0.0;
  }
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxSteps: return "max_steps";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  const objective::Problem p = build_problem(cfg);
  const oracle::OracleSolution sol = oracle::solve_kkt(p);
  const graph::NetworkSchedule schedule = build_schedule(cfg);
  const protocol::ProtocolConfig pcfg = build_protocol(cfg);

  const protocol::InitMode mode = cfg.init == "random"
                                      ? protocol::InitMode::RandomFeasible
                                      : protocol::InitMode::Uniform;
  const std::uint64_t init_seed =
      Rng::seeded(cfg.master_seed).fork(0x1217).next_u64();
  const protocol::AllocationState init =
      protocol::feasible_init(p, mode, init_seed);

  ScenarioResult out;
  out.x_star = sol.x_star;
  out.f_star = sol.f_star;

  double max_rate = 0.0;
  RunStatus status;
  if (cfg.delay.enabled) {
    delay::DelayedRunConfig dc;
    dc.mode = cfg.delay.mode;
    dc.base = pcfg;
    dc.delay.tau_bar = cfg.delay.tau_bar;
    dc.delay.mode = cfg.delay.assignment;
    dc.delay.seed = Rng::seeded(cfg.master_seed).fork(cfg.delay.seed).next_u64();
    delay::DelayedRunResult r =
        cfg.delay.mode == delay::DelayedMode::CaseI
            ? delay::run_case_i(p, schedule, dc, init, sol.f_star)
            : delay::run_case_ii(p, schedule, dc, init, sol.f_star);
    out.trace = std::move(r.trace);
    status = r.status;
    max_rate = r.max_rate;
  } else {
    protocol::RunResult r = protocol::run(p, schedule, pcfg, init, sol.f_star);
    out.trace = std::move(r.trace);
    status = r.status;
    max_rate = r.max_rate;
  }

  RunReport& rep = out.report;
  rep.status = status;
  rep.final_residual = out.trace.back().residual;
  rep.max_rate = max_rate;
  rep.master_seed = cfg.master_seed;
  rep.config_hash = config_hash(cfg);
  rep.t_lambda = advisory_t_lambda(p, pcfg.map, schedule);
  const double effective_T =
      cfg.delay.enabled ? cfg.step_T * (cfg.delay.tau_bar + 1) : cfg.step_T;
  rep.step_respects_bound = rep.t_lambda > 0.0 && effective_T < rep.t_lambda;
  if (cfg.termination_residual > 0.0) {
    for (const TraceRecord& r : out.trace)
      if (r.residual <= cfg.termination_residual) {
        rep.iterations_to_target = r.step;
        break;
      }
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (!cfg.trace_csv.empty()) {
    std::ofstream f(cfg.trace_csv);
    if (!f) throw Error("cannot write trace CSV: " + cfg.trace_csv);
    analysis::write_trace_csv(f, out.trace);
  }
  if (!cfg.states_csv.empty()) {
    std::ofstream f(cfg.states_csv);
    if (!f) throw Error("cannot write states CSV: " + cfg.states_csv);
    analysis::write_states_csv(f, out.trace);
  }
  if (!cfg.report_path.empty()) {
    std::ofstream f(cfg.report_path);
    if (!f) throw Error("cannot write report: " + cfg.report_path);
    f << format_report(rep);
  }
  return out;
}

std::string format_report(const RunReport& r) {
  std::ostringstream os;
  os << "status = " << status_name(r.status) << "\n"
     << "final_residual = " << fmt(r.final_residual) << "\n"
     << "iterations_to_target = " << r.iterations_to_target << "\n"
     << "t_lambda = " << fmt(r.t_lambda) << "\n"
     << "step_respects_bound = " << (r.step_respects_bound ? 1 : 0) << "\n"
     << "max_rate = " << fmt(r.max_rate) << "\n"
     << "wall_seconds = " << fmt(r.wall_seconds) << "\n"
     << "master_seed = " << r.master_seed << "\n"
     << "config_hash = " << r.config_hash << "\n";
  return os.str();
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg) {
  if (!cfg.sweep) throw ValidationError("run_sweep requires a [sweep] section");
  const SweepSpec& sw = *cfg.sweep;
  const std::vector<double> ts =
      sw.t_values.empty() ? std::vector<double>{cfg.step_T} : sw.t_values;
  const std::vector<double> ps =
      sw.p_values.empty() ? std::vector<double>{cfg.er_p} : sw.p_values;

  struct Trial {
    ScenarioConfig cfg;
    SweepRow row;
  };
  std::vector<Trial> trials;
  long trial_idx = 0;
  for (double T : ts)
    for (double p : ps)
      for (std::uint64_t seed : sw.seeds) {
        Trial t;
        t.cfg = cfg;
        t.cfg.step_T = T;
        t.cfg.er_p = p;
        t.cfg.net_seed = seed;
        t.cfg.termination_residual = sw.target_residual;
        t.cfg.sweep.reset();
        t.cfg.trace_csv.clear();
        t.cfg.states_csv.clear();
        t.cfg.report_path.clear();
        t.row.trial = trial_idx++;
        t.row.step_T = T;
        t.row.er_p = p;
        t.row.seed = seed;
        trials.push_back(std::move(t));
      }

  unsigned workers = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("DRA_WORKERS")) {
    const long w = std::strtol(env, nullptr, 10);
    if (w >= 1) workers = static_cast<unsigned>(w);
  }
  workers = std::max(1u, std::min<unsigned>(workers, trials.size()));

  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= trials.size()) return;
      Trial& t = trials[i];
      try {
        const ScenarioResult res = run_scenario(t.cfg);
        t.row.status = res.report.status;
        t.row.iterations_to_target = res.report.iterations_to_target;
        t.row.final_residual = res.report.final_residual;
      } catch (const std::exception&) {
        t.row.failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& th : pool) th.join();

  std::vector<SweepRow> rows;
  rows.reserve(trials.size());
  for (const Trial& t : trials) rows.push_back(t.row);
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "trial,T,p,seed,status,iterations_to_target,final_residual\n";
  for (const SweepRow& r : rows) {
    os << r.trial << ',' << fmt(r.step_T) << ',' << fmt(r.er_p) << ','
       << r.seed << ',' << (r.failed ? "failed" : status_name(r.status)) << ','
       << r.iterations_to_target << ',' << fmt(r.final_residual) << '\n';
  }
  os << "# aggregates\nT,p,trials,mean_iterations,std_iterations,mean_final_residual\n";
  // Grid cells in first-appearance order.
  std::vector<std::pair<double, double>> cells;
  for (const SweepRow& r : rows) {
    const std::pair<double, double> c{r.step_T, r.er_p};
    if (std::find(cells.begin(), cells.end(), c) == cells.end())
      cells.push_back(c);
  }
  for (const auto& [T, p] : cells) {
    double sum = 0.0, sum2 = 0.0, fsum = 0.0;
    long count = 0;
    for (const SweepRow& r : rows) {
      if (r.failed || r.step_T != T || r.er_p != p) continue;
      if (r.iterations_to_target < 0) continue;
      sum += static_cast<double>(r.iterations_to_target);
      sum2 += static_cast<double>(r.iterations_to_target) *
              static_cast<double>(r.iterations_to_target);
      fsum += r.final_residual;
      ++count;
    }
    if (count == 0) continue;
    const double mean = sum / count;
    const double var = std::max(0.0, sum2 / count - mean * mean);
    os << fmt(T) << ',' << fmt(p) << ',' << count << ',' << fmt(mean) << ','
       << fmt(std::sqrt(var)) << ',' << fmt(fsum / count) << '\n';
  }
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  if (name == "edp50") {
    c.n = 50;
    c.b = 3200.0;
    c.costs = "table2";
    c.cost_seed = 11;
    c.network = "er";
    c.er_p = 0.2;
    c.weight_lo = 0.005;
    c.weight_hi = 0.025;
    c.net_seed = 5;
    c.normalize_weights = true;  // per-agent rate bound equals kappa
    c.variant = "node";
    c.nonlinearity = "sat(kappa=" + fmt(1.0 / 60.0) + ")";
    c.step_T = 0.01;
    c.max_steps = 5000;
    return c;
  }
  if (name == "edp5-cycle") {
    c.n = 5;
    c.b = 300.0;
    c.costs = "table2";
    c.cost_seed = 3;
    c.network = "cycle";
    c.variant = "node";
    c.nonlinearity = "sat(kappa=" + fmt(1.0 / 60.0) + ")";
    c.step_T = 0.04;
    c.max_steps = 200000;
    return c;
  }
  if (name == "quantized100") {
    c.n = 100;
    c.b = 10.0;
    c.costs = "logexp8";
    c.cost_seed = 7;
    c.network = "spread";
    c.er_p = 0.05;
    c.weight_lo = 0.5;
    c.weight_hi = 1.0;
    c.net_seed = 13;
    c.window = 100;
    c.dwell = 1;
    c.variant = "node";
    c.nonlinearity = "sat(kappa=1) o logq(delta=0.125)";
    c.step_T = 0.1;
    c.max_steps = 5000;
    return c;
  }
  throw ValidationError("unknown preset: " + name);
}

}  // namespace dra::cli
