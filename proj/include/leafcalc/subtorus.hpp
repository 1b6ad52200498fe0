#pragma once

#include <optional>
#include <vector>

#include "leafcalc/form.hpp"
#include "leafcalc/smith.hpp"
#include "leafcalc/torus_model.hpp"

namespace leafcalc {

/// Linear subtorus b + span(v_1..v_d) mod 1 with integer direction vectors.
/// The directions must be primitive (they generate the full lattice of the
/// subtorus) and ordered leafwise-first; the induced orientation is the one
/// of the given order.
///
/// The foliated structure splits the span into the leafwise part V cap F
/// (dimension k) and a transverse part whose Q-projection has dimension u.
class LinearSubtorus {
 public:
  LinearSubtorus(ModelPtr model, Eigen::VectorXd basepoint, std::vector<IntVector> directions);

  const ModelPtr& model() const { return model_; }
  const Eigen::VectorXd& basepoint() const { return basepoint_; }
  const std::vector<IntVector>& directions() const { return directions_; }

  int dim() const { return static_cast<int>(directions_.size()); }
  int leaf_dim() const { return k_; }
  int transverse_dim() const { return u_; }

  /// Orthonormal frame of V cap F, ordered by the leafwise input directions.
  const Eigen::MatrixXd& leafwise_frame() const { return leaf_frame_; }
  /// Orthonormal frame of pi_Q(V) inside the transverse subspace.
  const Eigen::MatrixXd& transverse_projection_frame() const { return trans_frame_; }
  /// Orthonormal complement of the leafwise frame inside F, oriented so the
  /// combined frame (leafwise, normal) is positively oriented in F.
  const Eigen::MatrixXd& normal_leafwise_frame() const { return normal_leaf_; }
  /// Orthonormal complement of pi_Q(V) inside Q.
  const Eigen::MatrixXd& normal_transverse_frame() const { return normal_trans_; }

  /// Jacobian relating the integer parametrization t -> b + D t to the
  /// foliated (leaf volume x transversal volume) measure.
  double measure_factor() const { return measure_factor_; }

  LinearSubtorus translated(const Eigen::VectorXd& new_basepoint) const;

  /// Exact pairing with a tangential form of degree k: the integral of the
  /// restricted form against the foliated measure, evaluated termwise (only
  /// modes orthogonal to every direction survive).
  double pair(const TangentialForm& omega) const;

  /// Same pairing evaluated by quadrature of an arbitrary component sampler
  /// f(x) -> value of the integrand's leafwise-frame component at x.
  double pair_quadrature(const std::function<double(const Eigen::VectorXd&)>& integrand,
                         int samples_per_axis) const;

  /// Value of theta^I on the leafwise frame columns (a k x k minor).
  double frame_minor(IndexSet I) const;

 private:
  ModelPtr model_;
  Eigen::VectorXd basepoint_;
  std::vector<IntVector> directions_;
  int k_ = 0, u_ = 0;
  Eigen::MatrixXd leaf_frame_, trans_frame_, normal_leaf_, normal_trans_;
  double measure_factor_ = 1.0;
};

struct TransversalityResult {
  bool transversal = false;
  bool nonempty = false;
  std::int64_t component_count = 0;
  /// One subtorus per connected component (shared directions, shifted
  /// basepoints); empty when not transversal or empty.
  std::vector<LinearSubtorus> components;
};

/// Foliated transversality of two linear subtori: the full spans and the
/// leafwise spans must each fill their ambient space. On success the
/// intersection components are returned; their leaf dimension is k+l-p.
TransversalityResult check_transversal_submanifolds(const LinearSubtorus& s,
                                                    const LinearSubtorus& t);

/// Density ratio h with h vol_Q(S cap T) (x) vol_Q(M) = vol_Q(S) (x) vol_Q(T),
/// computed from Gram determinants of the transverse frames. Constant for
/// linear data.
double h_factor(const LinearSubtorus& s, const LinearSubtorus& t);

/// Integer conormal lattice basis: all c in Z^n with c . v = 0 for every
/// direction v.
std::vector<IntVector> conormal_lattice(const LinearSubtorus& s);

}  // namespace leafcalc
