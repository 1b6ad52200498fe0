#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "leafcalc/affine_map.hpp"
#include "leafcalc/json_fwd.hpp"
#include "leafcalc/suspension.hpp"
#include "leafcalc/vector_field.hpp"

namespace leafcalc {

/// Scalar flow cocycle rho^t = e^{rate t}; rho^0 = 1 and additivity hold by
/// construction.
struct ScalarCocycle {
  double rate = 0.0;
  double value(double t) const { return std::exp(rate * t); }
  double trace(double t) const { return value(t); }  // rank-one bundle
};

struct Rk4Settings {
  double step = 1e-3;
};

/// Global foliated flow in one of the three flat realizations: translation
/// flow (affine), integrated foliated vector field, or suspension flow of a
/// hyperbolic toral automorphism.
class Flow {
 public:
  enum class Variant { kAffine, kVectorField, kSuspension };

  static Flow affine(ModelPtr model, const Eigen::VectorXd& velocity, double cocycle_rate = 0.0);
  static Flow vector_field(FoliatedVectorField field, Rk4Settings settings = {},
                           double cocycle_rate = 0.0);
  static Flow suspension(SuspensionModel model, double cocycle_rate = 0.0);

  Variant variant() const { return variant_; }
  const ModelPtr& torus_model() const;
  const SuspensionModel& suspension_model() const;
  const FoliatedVectorField& field() const;
  const Eigen::VectorXd& velocity() const;
  const Rk4Settings& settings() const { return settings_; }
  const ScalarCocycle& cocycle() const { return cocycle_; }

  /// Time-t map as an affine torus map (affine flows only).
  AffineFoliatedMap time_map(double t) const;

 private:
  Flow() = default;
  Variant variant_ = Variant::kAffine;
  ModelPtr model_;
  std::optional<FoliatedVectorField> field_;
  Eigen::VectorXd velocity_;
  std::optional<SuspensionModel> suspension_;
  Rk4Settings settings_;
  ScalarCocycle cocycle_;
};

/// Point advance; affine flows are exact, vector fields use fixed-step RK4.
Eigen::VectorXd flow_map(const Flow& flow, double t, const Eigen::VectorXd& x);
SuspensionPoint flow_map(const Flow& flow, double t, const SuspensionPoint& x);

/// Joint state for incremental integration of position and the variational
/// equation dV/dt = DX(x) V.
struct FlowState {
  Eigen::VectorXd x;
  Eigen::MatrixXd v;
};

FlowState initial_state(const Flow& flow, const Eigen::VectorXd& x);
void advance(const Flow& flow, FlowState& state, double dt);

struct LinearizationBlocks {
  Eigen::MatrixXd tangential;  // p x p in the w frame
  Eigen::MatrixXd transverse;  // q x q in the u frame
};

LinearizationBlocks linearize_at(const Flow& flow, double t, const Eigen::VectorXd& point);

struct FixedPointRecord {
  Eigen::VectorXd location;
  Eigen::MatrixXd tangential_block;
  Eigen::MatrixXd transverse_block;
  double residual = 0.0;
  double t_sample = 1.0;
};

struct FixedPointSearchStats {
  int seeds = 0;
  int converged_seeds = 0;  // Newton runs that reached the residual tolerance
};

/// Fixed points of the flow (zeros of the generator). Affine flows with
/// nonzero velocity have none; a vanishing velocity is a positive-dimensional
/// fixed set and is rejected. Vector-field flows run Newton refinement from a
/// uniform seed grid; non-convergent seeds are counted in the stats.
std::vector<FixedPointRecord> fixed_points(const Flow& flow, double t,
                                           int seed_grid_per_axis = 32,
                                           FixedPointSearchStats* stats = nullptr);

struct PeriodicOrbitRecord {
  RationalPoint representative;      // lexicographically smallest orbit point
  std::int64_t least_period = 1;     // l(gamma)
  std::int64_t multiplicity = 1;     // nu; the coincidence time is nu l(gamma)
  IntMatrix tangential_return_map;   // monodromy^{l(gamma)} on the fiber
  // the reduced transverse return map is 0 x 0 for suspensions (q = 1)
};

/// Exact enumeration of the suspension periodic orbits: for each time
/// nu <= nu_max the lattice congruence (A^nu - id)x = 0 mod Z^d is solved by
/// Smith reduction, the solutions grouped into monodromy orbits, and one
/// record emitted per orbit per time.
std::vector<PeriodicOrbitRecord> periodic_orbits_suspension(const SuspensionModel& model,
                                                            int nu_max);

/// Quotient of the transverse return derivative by the flow line: compression
/// onto an orthonormal complement of xbar (the determinant is independent of
/// the complement). Throws when xbar vanishes.
Eigen::MatrixXd reduced_transverse_map(const Eigen::MatrixXd& transverse_block,
                                       const Eigen::VectorXd& xbar_coords);

/// Suspension orbits: the transverse line is the flow direction itself, so
/// the quotient is the 0 x 0 map (determinant convention 1).
Eigen::MatrixXd reduced_transverse_map(const SuspensionModel& model,
                                       const PeriodicOrbitRecord& rec);

struct TransversalityReport {
  bool transversal = false;
  double min_abs_det_tangential = 0.0;
  double min_abs_det_transverse = 0.0;
  bool sign_stable = true;           // sgn det(id - F phi^t) across the samples
  std::vector<int> tangential_signs;
};

/// Graph-transversality of the coincidence at a fixed point, restated as the
/// determinant conditions of the two span equations, sampled at several t.
TransversalityReport transversality_fixed_point(const Flow& flow, const FixedPointRecord& rec,
                                                const std::vector<double>& t_samples);

/// Determinant conditions for a suspension orbit record.
TransversalityReport transversality_orbit(const SuspensionModel& model,
                                          const PeriodicOrbitRecord& rec);

/// Smallest T <= max_k/|v|_inf with T v integral, if any: affine flows with a
/// rational direction carry periodic-orbit families whose return derivative
/// is the identity (never graph-transversal).
std::optional<double> affine_periodic_time(const Eigen::VectorXd& velocity, int max_k = 1000,
                                           double tol = 1e-9);

/// Report entries: location/period data, block matrices, determinant values
/// and the transversality flag.
nlohmann::json record_to_json(const FixedPointRecord& rec, const TransversalityReport& trans);
nlohmann::json record_to_json(const PeriodicOrbitRecord& rec, const TransversalityReport& trans);

}  // namespace leafcalc
