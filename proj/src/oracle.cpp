#include "dra/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dra/errors.hpp"

namespace dra::oracle {

namespace {

// Inverts the strictly increasing gradient of one cost at level phi by
// bracketed bisection down to machine precision.
double invert_gradient(const objective::CostModel& cost, double phi) {
  double lo = 0.0, hi = 0.0;
  double g0 = objective::gradient(cost, 0.0);
  double step = 1.0;
  if (g0 < phi) {
    hi = step;
    for (int k = 0; objective::gradient(cost, hi) < phi; ++k) {
      if (k >= 200) throw BracketFailure("gradient inversion bracket failed");
      lo = hi;
      step *= 2.0;
      hi += step;
    }
  } else {
    lo = -step;
    for (int k = 0; objective::gradient(cost, lo) > phi; ++k) {
      if (k >= 200) throw BracketFailure("gradient inversion bracket failed");
      hi = lo;
      step *= 2.0;
      lo -= step;
    }
  }
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (objective::gradient(cost, mid) < phi)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double allocation_sum(const objective::Problem& p, double phi,
                      std::vector<double>& x) {
  double sum = 0.0, carry = 0.0;
  for (int i = 0; i < p.n(); ++i) {
    x[static_cast<size_t>(i)] = invert_gradient(p.costs[static_cast<size_t>(i)], phi);
    const double y = x[static_cast<size_t>(i)] - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

OracleSolution solve_kkt(const objective::Problem& p) {
  const int n = p.n();
  const double share = p.b / n;
  double phi0 = 0.0;
  for (const auto& c : p.costs) phi0 += objective::gradient(c, share);
  phi0 /= n;

  OracleSolution sol;
  sol.x_star.assign(static_cast<size_t>(n), 0.0);
  std::vector<double> x(static_cast<size_t>(n));

  // Grow a bracket [phi_lo, phi_hi] with S(phi_lo) <= b <= S(phi_hi); S is
  // strictly increasing in phi.
  double phi_lo = phi0, phi_hi = phi0;
  double s0 = allocation_sum(p, phi0, x);
  double step = std::max(1.0, std::abs(phi0));
  if (s0 < p.b) {
    int k = 0;
    do {
      if (k++ >= 200) throw BracketFailure("could not bracket b from above");
      phi_hi += step;
      step *= 2.0;
    } while (allocation_sum(p, phi_hi, x) < p.b);
  } else {
    int k = 0;
    do {
      if (k++ >= 200) throw BracketFailure("could not bracket b from below");
      phi_lo -= step;
      step *= 2.0;
    } while (allocation_sum(p, phi_lo, x) > p.b);
  }

  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (phi_lo + phi_hi);
    if (mid == phi_lo || mid == phi_hi) break;
    sol.iterations += 1;
    if (allocation_sum(p, mid, x) < p.b)
      phi_lo = mid;
    else
      phi_hi = mid;
  }
  sol.phi_star = 0.5 * (phi_lo + phi_hi);
  allocation_sum(p, sol.phi_star, sol.x_star);

  sol.residual_kkt = 0.0;
  for (int i = 0; i < n; ++i)
    sol.residual_kkt = std::max(
        sol.residual_kkt,
        std::abs(objective::gradient(p.costs[static_cast<size_t>(i)],
                                     sol.x_star[static_cast<size_t>(i)]) -
                 sol.phi_star));
  sol.f_star = objective::global_cost(p, sol.x_star);
  return sol;
}

GridSolution brute_force_grid(const objective::Problem& p, int resolution,
                              const std::vector<std::pair<double, double>>& box) {
  const int n = p.n();
  if (n > 4) throw TooManyAgents("brute_force_grid supports n <= 4");
  if (static_cast<int>(box.size()) != n)
    throw DimensionMismatch("box size must equal n");
  if (resolution < 2) throw InvalidRange("resolution must be >= 2");

  GridSolution best;
  bool found = false;
  std::vector<double> x(static_cast<size_t>(n));
  std::vector<double> spacing(static_cast<size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i) {
    const auto [lo, hi] = box[static_cast<size_t>(i)];
    if (!(hi > lo)) throw InvalidRange("box must have positive extent");
    spacing[static_cast<size_t>(i)] = (hi - lo) / (resolution - 1);
    best.spacing = std::max(best.spacing, spacing[static_cast<size_t>(i)]);
  }

  std::vector<int> idx(static_cast<size_t>(n - 1), 0);
  const auto [last_lo, last_hi] = box[static_cast<size_t>(n - 1)];
  for (;;) {
    double sum = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      x[static_cast<size_t>(i)] = box[static_cast<size_t>(i)].first +
                                  idx[static_cast<size_t>(i)] *
                                      spacing[static_cast<size_t>(i)];
      sum += x[static_cast<size_t>(i)];
    }
    const double last = p.b - sum;
    if (last >= last_lo && last <= last_hi) {
      x[static_cast<size_t>(n - 1)] = last;
      const double c = objective::global_cost(p, x);
      if (!found || c < best.cost) {
        best.cost = c;
        best.x = x;
        found = true;
      }
    }
    int d = 0;
    while (d < n - 1 && ++idx[static_cast<size_t>(d)] == resolution) {
      idx[static_cast<size_t>(d)] = 0;
      ++d;
    }
    if (d == n - 1) break;
  }
  if (!found) throw EmptyFeasibleGrid("no grid point satisfies the constraint");
  return best;
}

}  // namespace dra::oracle
