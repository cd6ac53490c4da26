#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dra/errors.hpp"

namespace dra::graph {

struct Edge {
  int i = 0;
  int j = 0;
  double w = 0.0;
};

// Weighted graph over agents 0..n-1. Undirected graphs store each edge once
// (i < j) and expose symmetric adjacency; directed graphs keep edges as given.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(int n, bool directed);

  // Throws InvalidRange on self-loops, bad indices, or non-positive weight.
  void add_edge(int i, int j, double w);

  int n() const { return n_; }
  bool directed() const { return directed_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Neighbors of i with weights; symmetric view for undirected graphs,
  // out-neighbors for directed ones. Sorted by neighbor index.
  const std::vector<std::pair<int, double>>& neighbors(int i) const {
    return adj_[i];
  }

  double weighted_degree(int i) const;

 private:
  int n_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

struct SpectralSummary {
  double lambda2 = 0.0;
  double lambda_n = 0.0;
};

struct Snapshot {
  long duration_steps = 1;
  WeightedGraph graph;
};

// Cyclic sequence of graph snapshots; step k >= 0 maps into the period.
class NetworkSchedule {
 public:
  NetworkSchedule() = default;
  NetworkSchedule(std::vector<Snapshot> snapshots, long window_B);

  static NetworkSchedule single(WeightedGraph g);

  const WeightedGraph& at_step(long k) const;
  long period() const { return period_; }
  long window_B() const { return window_B_; }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }

  // Edge union of the snapshots active during [start, start+window) steps.
  WeightedGraph union_over_window(long start, long window) const;

  // Union over one full period (default spectral reference for switching
  // schedules).
  WeightedGraph union_graph() const;

 private:
  std::vector<Snapshot> snapshots_;
  long window_B_ = 1;
  long period_ = 0;
  std::vector<long> offsets_;  // cumulative start step of each snapshot
};

struct ConnectivityReport {
  bool connected = true;
  long first_violating_window = -1;
};

// Dense row-major n*n Laplacian.
std::vector<double> laplacian(const WeightedGraph& g);

// Eigenvalues of a dense symmetric matrix via cyclic Jacobi sweeps, ascending.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

// Fiedler value and largest Laplacian eigenvalue. Directed graphs must be
// weight-balanced; the symmetrized Laplacian (L + L^T)/2 is used then.
SpectralSummary spectral_summary(const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);

// Checks the spanning-tree-in-every-window condition over one full period.
ConnectivityReport check_uniform_connectivity(const NetworkSchedule& s);

bool is_weight_balanced(const WeightedGraph& g);

WeightedGraph generate_erdos_renyi(int n, double p, double weight_lo,
                                   double weight_hi, std::uint64_t seed);

// Rescale weights so every node's incident weight sum is at most 1; used by
// the saturation presets so the clipping level bounds the per-agent rate.
WeightedGraph normalize_incident_weights(const WeightedGraph& g);

// Line-oriented snapshot format: "n <count> directed <0|1>" then "i j w".
void write_graph(std::ostream& os, const WeightedGraph& g);
WeightedGraph read_graph(std::istream& is);
WeightedGraph read_graph_file(const std::string& path);

}  // namespace dra::graph
