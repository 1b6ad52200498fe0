#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leafcalc/distribution.hpp"
#include "leafcalc/flow.hpp"
#include "leafcalc/hodge.hpp"

namespace leafcalc {

/// A flow hypothesis required by one of the two trace identities fails
/// (graph transversality or finite-dimensional reduced cohomology).
struct HypothesisViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One local term of the dynamical Lefschetz distribution.
struct LocalContribution {
  enum class Kind { kFixedPoint, kPeriodicOrbit };
  Kind kind = Kind::kFixedPoint;
  int sign = 1;              // sgn det(id - F phi)
  double magnitude = 1.0;    // 1/|det(id - Q phi)| resp. 1/|det(id - Qbar phi)|
  double trace_factor = 1.0; // Tr rho at the sample or atom time
  double least_period = 0.0;
  std::int64_t multiplicity = 0;
  double atom_time = 0.0;
  double atom_weight = 0.0;
  nlohmann::json to_json() const;
};

struct FixedPointDensity {
  LocalContribution contribution;
  std::vector<double> density;  // sign * Tr rho(t) / |det(id - Q phi^t)| on the grid
};

/// Density of one fixed point over the time grid. Throws when the transverse
/// determinant degenerates below 1e-10 anywhere on the grid.
FixedPointDensity fixed_point_contribution(const Flow& flow, const FixedPointRecord& rec,
                                           const std::vector<double>& t_grid);

/// Atom of one periodic orbit record at time nu l(gamma).
LocalContribution orbit_contribution(const SuspensionModel& model, const PeriodicOrbitRecord& rec,
                                     const ScalarCocycle& rho);

struct LefschetzDistribution {
  DistributionOnRPlus distribution;
  std::vector<LocalContribution> contributions;
  bool transversal = true;
  std::string note;
};

/// Local side of the dynamical Lefschetz formula: fixed-point densities plus
/// the orbit atom comb, aggregated at coincident times. Affine flows along a
/// rational direction violate graph transversality and are rejected.
LefschetzDistribution assemble_lefschetz_distribution(const Flow& flow, double t_max,
                                                      int t_samples = 512);

/// Alternating sum of traces of the time-t pullbacks on the reduced
/// cohomology basis, sampled over the grid. Affine flows use the exact
/// pullback matrices; vector-field flows on one-leaf models evaluate the
/// pullback matrices by quadrature of the variational minors.
std::vector<double> lefschetz_number_function(const Flow& flow, const CohomologyBasis& basis,
                                              const std::vector<double>& t_grid,
                                              int quad_grid_per_axis = 64);

struct VerificationReport {
  enum class Mode { kFull, kPartialLocal, kPartialCohomological };
  Mode mode = Mode::kFull;
  bool pass = false;
  double max_smooth_deviation = 0.0;
  double max_atom_weight = 0.0;
  bool local_oracle_pass = false;  // partial-local: exact integer comparison
  std::vector<DiracAtom> atoms;
  std::vector<double> oracle_atom_weights;
  std::string note;
  nlohmann::json to_json() const;
};

/// Checks both displays of the dynamical Lefschetz identity: the smooth
/// parts agree pointwise and every aggregated atom weight vanishes. When one
/// hypothesis fails the report degrades to the partial mode certifying only
/// the side whose hypothesis holds (suspensions: the local side against the
/// integer determinant oracle).
VerificationReport verify_dynamical_lefschetz(const Flow& flow, const CohomologyBasis* basis,
                                              double t_max, int t_samples = 512);

struct ClassicalLefschetzReport {
  std::int64_t fixed_point_count = 0;
  double left = 0.0;   // sum of signs times cocycle traces over the fixed points
  double right = 0.0;  // alternating trace on cohomology
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Classical Lefschetz trace formula for a hyperbolic affine self-map of a
/// one-leaf torus; both sides are integers and compared exactly.
ClassicalLefschetzReport classical_lefschetz_check(const AffineFoliatedMap& f,
                                                   const CohomologyBasis& basis,
                                                   double cocycle_value = 1.0);

struct CoincidenceReport {
  std::vector<double> via_duality;     // per grid point, dual-basis route
  std::vector<double> via_projection;  // per grid point, Hodge projection route
  double max_deviation = 0.0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Two independent evaluations of the alternating trace function of a family
/// of maps: coefficient extraction against dual bases through the duality
/// pairing versus L^2 projection matrices. The family is either the time-t
/// maps of an affine flow or a constant map.
CoincidenceReport dual_trace_check(const Flow& flow, const CohomologyBasis& basis,
                                            const std::vector<double>& t_grid);
CoincidenceReport dual_trace_check(const AffineFoliatedMap& constant_map,
                                            const CohomologyBasis& basis,
                                            const std::vector<double>& t_grid);

}  // namespace leafcalc
