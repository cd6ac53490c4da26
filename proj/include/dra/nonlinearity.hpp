#pragma once

#include <limits>
#include <memory>
#include <string>

#include "dra/errors.hpp"

namespace dra::nonlinearity {

// Declared sector constants: epsilon |y| <= |g(y)| <= K_g |y| on the map's
// validation domain.
struct Sector {
  double epsilon = 0.0;
  double k_g = std::numeric_limits<double>::infinity();
};

// Odd, sign-preserving scalar maps used on nodes or links. Each map carries
// declared sector constants valid on its operating domain |y| <= domain_bound
// (infinite by default where the global sector holds).
class NonlinearMap {
 public:
  enum class Kind {
    Identity,
    SignPower,
    FixedTime,
    Saturation,
    LogQuantizer,
    UniformQuantizer,
    RobustDeadZone,
    Compose,
  };

  static NonlinearMap identity();
  static NonlinearMap sign_power(double nu, double domain_bound);
  static NonlinearMap fixed_time(double nu1, double nu2, double domain_bound);
  static NonlinearMap saturation(double kappa, double domain_bound);
  static NonlinearMap log_quantizer(double delta);
  static NonlinearMap uniform_quantizer(double delta);
  static NonlinearMap robust_dead_zone(double eps_hat, double d,
                                       double domain_bound);
  static NonlinearMap compose(NonlinearMap outer, NonlinearMap inner);

  Kind kind() const { return kind_; }
  const Sector& sector() const { return sector_; }
  bool strongly_sign_preserving() const { return strongly_sign_preserving_; }
  double domain_bound() const { return domain_bound_; }

  double p1() const { return p1_; }
  double p2() const { return p2_; }

  std::string describe() const;

 private:
  NonlinearMap() = default;

  Kind kind_ = Kind::Identity;
  double p1_ = 0.0;  // nu / nu1 / kappa / delta / eps_hat
  double p2_ = 0.0;  // nu2 / d
  double domain_bound_ = std::numeric_limits<double>::infinity();
  Sector sector_{1.0, 1.0};
  bool strongly_sign_preserving_ = true;
  std::shared_ptr<const NonlinearMap> outer_;
  std::shared_ptr<const NonlinearMap> inner_;

  friend double eval(const NonlinearMap&, double);
};

double eval(const NonlinearMap& map, double y);

struct SectorAudit {
  double epsilon_observed = 0.0;
  double kg_observed = 0.0;
  bool holds = false;
};

// Empirical inf/sup of |g(y)|/|y| over `samples` grid points of [lo, hi],
// skipping a 1e-12 neighborhood of 0.
SectorAudit verify_sector(const NonlinearMap& map, double lo, double hi,
                          int samples);

// Expression strings like "sat(kappa=0.0166)" or
// "sat(kappa=1) o logq(delta=0.125)"; `o` composes left-to-right as
// outer o inner.
NonlinearMap parse_expression(const std::string& text);

}  // namespace dra::nonlinearity
