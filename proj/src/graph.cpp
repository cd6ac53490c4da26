#include "dra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dra/rng.hpp"

namespace dra::graph {

WeightedGraph::WeightedGraph(int n, bool directed)
    : n_(n), directed_(directed), adj_(static_cast<size_t>(std::max(n, 0))) {
  if (n <= 0) throw InvalidRange("graph needs at least one node");
}

void WeightedGraph::add_edge(int i, int j, double w) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw InvalidRange("edge endpoint out of range");
  if (i == j) throw InvalidRange("self-loops are not allowed");
  if (!(w > 0.0)) throw InvalidRange("edge weight must be strictly positive");
  if (!directed_ && i > j) std::swap(i, j);
  edges_.push_back({i, j, w});
  auto insert_sorted = [](std::vector<std::pair<int, double>>& v, int k,
                          double weight) {
    auto it = std::lower_bound(
        v.begin(), v.end(), k,
        [](const std::pair<int, double>& e, int key) { return e.first < key; });
    v.insert(it, {k, weight});
  };
  insert_sorted(adj_[i], j, w);
  if (!directed_) insert_sorted(adj_[j], i, w);
}

double WeightedGraph::weighted_degree(int i) const {
  double s = 0.0;
  for (const auto& [j, w] : adj_[i]) s += w;
  return s;
}

NetworkSchedule::NetworkSchedule(std::vector<Snapshot> snapshots, long window_B)
    : snapshots_(std::move(snapshots)), window_B_(window_B) {
  if (snapshots_.empty()) throw InvalidRange("schedule must be non-empty");
  if (window_B_ < 1) throw InvalidRange("window B must be positive");
  const int n = snapshots_.front().graph.n();
  for (const auto& s : snapshots_) {
    if (s.duration_steps < 1)
      throw InvalidRange("snapshot duration must be positive");
    if (s.graph.n() != n)
      throw InvalidRange("all snapshots must share the agent set");
  }
  offsets_.resize(snapshots_.size());
  period_ = 0;
  for (size_t i = 0; i < snapshots_.size(); ++i) {
    offsets_[i] = period_;
    period_ += snapshots_[i].duration_steps;
  }
}

NetworkSchedule NetworkSchedule::single(WeightedGraph g) {
  std::vector<Snapshot> snaps;
  snaps.push_back({1, std::move(g)});
  return NetworkSchedule(std::move(snaps), 1);
}

const WeightedGraph& NetworkSchedule::at_step(long k) const {
  long t = k % period_;
  if (t < 0) t += period_;
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), t);
  return snapshots_[static_cast<size_t>(it - offsets_.begin() - 1)].graph;
}

WeightedGraph NetworkSchedule::union_over_window(long start,
                                                 long window) const {
  const int n = snapshots_.front().graph.n();
  // max weight per unordered pair across the window
  std::map<std::pair<int, int>, double> acc;
  for (long t = start; t < start + window; ++t) {
    const WeightedGraph& g = at_step(t);
    for (const Edge& e : g.edges()) {
      int a = std::min(e.i, e.j), b = std::max(e.i, e.j);
      auto [it, fresh] = acc.try_emplace({a, b}, e.w);
      if (!fresh) it->second = std::max(it->second, e.w);
    }
  }
  WeightedGraph u(n, false);
  for (const auto& [key, w] : acc) u.add_edge(key.first, key.second, w);
  return u;
}

WeightedGraph NetworkSchedule::union_graph() const {
  return union_over_window(0, period_);
}

std::vector<double> laplacian(const WeightedGraph& g) {
  const int n = g.n();
  std::vector<double> L(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, w] : g.neighbors(i)) {
      L[static_cast<size_t>(i) * n + j] -= w;
      L[static_cast<size_t>(i) * n + i] += w;
    }
  }
  return L;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<size_t>(i) * n + j];
  };
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-24) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

SpectralSummary spectral_summary(const WeightedGraph& g) {
  std::vector<double> L = laplacian(g);
  const int n = g.n();
  if (g.directed()) {
    if (!is_weight_balanced(g))
      throw DirectedUnbalanced("spectral summary needs a weight-balanced digraph");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double s = 0.5 * (L[static_cast<size_t>(i) * n + j] +
                                L[static_cast<size_t>(j) * n + i]);
        L[static_cast<size_t>(i) * n + j] = s;
        L[static_cast<size_t>(j) * n + i] = s;
      }
  }
  std::vector<double> ev = symmetric_eigenvalues(std::move(L), n);
  SpectralSummary out;
  out.lambda_n = std::max(0.0, ev.back());
  constexpr double kZeroThreshold = 1e-8;
  for (double v : ev) {
    if (v > kZeroThreshold) {
      out.lambda2 = v;
      break;
    }
  }
  if (!is_connected(g)) out.lambda2 = 0.0;
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

}  // namespace

bool is_connected(const WeightedGraph& g) {
  const int n = g.n();
  if (n == 1) return true;
  UnionFind uf(n);
  for (const Edge& e : g.edges()) uf.unite(e.i, e.j);
  const int root = uf.find(0);
  for (int i = 1; i < n; ++i)
    if (uf.find(i) != root) return false;
  return true;
}

ConnectivityReport check_uniform_connectivity(const NetworkSchedule& s) {
  const long B = s.window_B();
  for (long start = 0; start < s.period(); ++start) {
    if (!is_connected(s.union_over_window(start, B)))
      return {false, start};
  }
  return {true, -1};
}

bool is_weight_balanced(const WeightedGraph& g) {
  if (!g.directed()) return true;
  const int n = g.n();
  std::vector<double> in(static_cast<size_t>(n), 0.0);
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  for (const Edge& e : g.edges()) {
    out[static_cast<size_t>(e.i)] += e.w;
    in[static_cast<size_t>(e.j)] += e.w;
  }
  for (int i = 0; i < n; ++i) {
    const double scale =
        std::max({1.0, std::abs(in[static_cast<size_t>(i)]),
                  std::abs(out[static_cast<size_t>(i)])});
    if (std::abs(in[static_cast<size_t>(i)] - out[static_cast<size_t>(i)]) >
        1e-12 * scale)
      return false;
  }
  return true;
}

WeightedGraph generate_erdos_renyi(int n, double p, double weight_lo,
                                   double weight_hi, std::uint64_t seed) {
  if (!(weight_lo > 0.0) || weight_lo > weight_hi)
    throw InvalidRange("weight range must satisfy 0 < lo <= hi");
  if (!(p > 0.0) || p > 1.0) throw InvalidRange("p must be in (0, 1]");
  Rng rng = Rng::seeded(seed);
  WeightedGraph g(n, false);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double coin = rng.uniform01();
      const double w = rng.uniform(weight_lo, weight_hi);
      if (coin < p) g.add_edge(i, j, w);
    }
  }
  return g;
}

WeightedGraph normalize_incident_weights(const WeightedGraph& g) {
  double max_deg = 0.0;
  for (int i = 0; i < g.n(); ++i)
    max_deg = std::max(max_deg, g.weighted_degree(i));
  WeightedGraph out(g.n(), g.directed());
  if (max_deg <= 0.0) return out;
  for (const Edge& e : g.edges()) out.add_edge(e.i, e.j, e.w / max_deg);
  return out;
}

void write_graph(std::ostream& os, const WeightedGraph& g) {
  os << "n " << g.n() << " directed " << (g.directed() ? 1 : 0) << "\n";
  for (const Edge& e : g.edges()) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", e.i, e.j, e.w);
    os << buf;
  }
}

WeightedGraph read_graph(std::istream& is) {
  std::string tag_n, tag_d;
  int n = 0, directed = 0;
  if (!(is >> tag_n >> n >> tag_d >> directed) || tag_n != "n" ||
      tag_d != "directed")
    throw ParseError("bad graph header; expected 'n <count> directed <0|1>'");
  WeightedGraph g(n, directed != 0);
  int i, j;
  double w;
  while (is >> i >> j >> w) g.add_edge(i, j, w);
  return g;
}

WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open graph file: " + path);
  return read_graph(f);
}

}  // namespace dra::graph
