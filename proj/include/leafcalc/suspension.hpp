#pragma once

#include "leafcalc/json_fwd.hpp"
#include "leafcalc/smith.hpp"

namespace leafcalc {

/// Mapping torus of an integer automorphism A of T^d: the quotient of
/// T^d x R by (x, s+1) ~ (A x, s). Leaves are the fibers T^d x {s}, so the
/// foliated dimension is (p, q) = (d, 1); the suspension flow advances the
/// base coordinate with unit speed.
class SuspensionModel {
 public:
  explicit SuspensionModel(IntMatrix monodromy);

  int fiber_dim() const { return d_; }
  int leaf_dim() const { return d_; }
  int transverse_dim() const { return 1; }
  const IntMatrix& monodromy() const { return a_; }
  bool hyperbolic() const { return hyperbolic_; }
  double min_eigenvalue_gap() const { return eigen_gap_; }

  IntMatrix monodromy_power(int nu) const;

  nlohmann::json to_json() const;
  static SuspensionModel from_json(const nlohmann::json& j);

 private:
  IntMatrix a_;
  int d_;
  bool hyperbolic_;
  double eigen_gap_;  // min | |lambda| - 1 | over the spectrum
};

/// Point of the mapping torus: fiber coordinates in [0,1)^d plus the base
/// circle coordinate in [0,1).
struct SuspensionPoint {
  Eigen::VectorXd fiber;
  double base = 0.0;
};

}  // namespace leafcalc
