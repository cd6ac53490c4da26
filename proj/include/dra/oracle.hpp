#pragma once

#include <utility>
#include <vector>

#include "dra/objective.hpp"

namespace dra::oracle {

struct OracleSolution {
  std::vector<double> x_star;
  double phi_star = 0.0;  // common gradient value at the optimum
  long iterations = 0;    // outer bisection steps
  double residual_kkt = 0.0;
  double f_star = 0.0;
};

// Centralized ground truth: finds phi such that sum_i (df_i)^{-1}(phi) = b by
// outer bisection from phi_0 = mean gradient at x = b/n, with per-agent
// gradient inversion by inner bisection. Throws BracketFailure when the sum
// cannot bracket b within 200 doublings.
OracleSolution solve_kkt(const objective::Problem& p);

struct GridSolution {
  std::vector<double> x;
  double cost = 0.0;
  double spacing = 0.0;  // coarsest grid spacing used
};

// Exhaustive feasible-grid search (n <= 4), for test-side validation only.
// The first n-1 coordinates range over `resolution` points of their boxes;
// the last is pinned by the constraint and kept when inside its box.
GridSolution brute_force_grid(const objective::Problem& p, int resolution,
                              const std::vector<std::pair<double, double>>& box);

}  // namespace dra::oracle
