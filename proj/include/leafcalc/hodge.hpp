#pragma once

#include <optional>
#include <vector>

#include "leafcalc/affine_map.hpp"
#include "leafcalc/form.hpp"

namespace leafcalc {

/// Spectral truncation box for harmonic scans: lattice modes up to M_max in
/// the sup norm, and the resonance tolerance below which a frame pairing
/// <m, w_j> counts as zero.
struct SpectralTruncation {
  int m_max = 50;
  double eps_res = 1e-9;
};

/// Mode whose divisors are small but not resonant; a small-divisor
/// diagnostic for Liouville-like slopes.
struct NearResonance {
  LatticeMode mode;
  double divisor = 0.0;  // max_j |<m, w_j>|
};

struct CohomologyLevel {
  int degree = 0;
  std::vector<TangentialForm> reps;
  Eigen::MatrixXd gram;
};

/// Harmonic representatives per degree with their Gram matrices. When the
/// only resonant mode within the box is m = 0 the reduced cohomology seen by
/// the truncation is finite dimensional; otherwise the basis is
/// truncation-limited and refuses finite-dimensional operations downstream.
struct CohomologyBasis {
  ModelPtr model;
  SpectralTruncation truncation;
  std::vector<CohomologyLevel> levels;  // 0..p
  bool finite_dimensional = false;
  std::vector<LatticeMode> resonant_modes;
  std::vector<NearResonance> near_resonances;  // smallest nonresonant divisors

  const CohomologyLevel& level(int kappa) const { return levels.at(static_cast<std::size_t>(kappa)); }
  std::vector<int> dimensions() const;
  nlohmann::json report() const;
};

/// Scan of the truncation box for resonant modes, assembling the harmonic
/// basis e_m theta^I per degree.
CohomologyBasis harmonic_basis(ModelPtr model, const SpectralTruncation& trunc);

/// Projection onto the resonant modes (the harmonic part); idempotent and
/// self-adjoint for the L^2 product. Acts termwise, so it does not depend on
/// the truncation box.
TangentialForm hodge_project(const TangentialForm& omega, const SpectralTruncation& trunc);

/// Kuenneth basis of the product model: all products of representatives.
/// Both factors must be finite dimensional.
CohomologyBasis kunneth_basis(const CohomologyBasis& a, const CohomologyBasis& b);

struct DualityPairing {
  Eigen::MatrixXd matrix;  // entries: integral of rep^{p-kappa}_i ^ rep^kappa_j vol_Q
  double determinant = 0.0;
  bool invertible = false;
};

/// Pairing between degrees p-kappa and kappa through the integration
/// current; singularity is reported, not silently accepted.
DualityPairing duality_pairing_matrix(const CohomologyBasis& basis, int kappa);

/// Matrix of (hodge projection) o (pullback by f) on the Gram-orthonormalized
/// representatives of degree kappa. Throws TruncationError if a pulled-back
/// mode leaves the box.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Eigen::MatrixXd pullback_matrix_on_cohomology(const AffineFoliatedMap& f,
                                              const CohomologyBasis& basis, int kappa);

/// Sum over degrees of (-1)^kappa tr of the pullback matrices.
double alternating_trace(const AffineFoliatedMap& f, const CohomologyBasis& basis);

}  // namespace leafcalc
