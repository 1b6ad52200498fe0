#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "leafcalc/json_fwd.hpp"

namespace leafcalc {

/// Flat model geometry: T^n = R^n / Z^n with a constant foliation whose
/// leaves run parallel to an orthonormal tangential frame w_1..w_p; the
/// transverse frame u_1..u_q completes it to an orthonormal basis of R^n.
/// The flat metric is bundle-like for this constant foliation, and the
/// torus has unit covolume, so every volume constant downstream is 1.
class FoliatedTorusModel {
 public:
  /// Gram-Schmidt over the given tangential directions (kept in input
  /// order), then the transverse frame from the standard basis vectors.
  static std::shared_ptr<const FoliatedTorusModel> from_directions(
      int n, const std::vector<Eigen::VectorXd>& tangential_directions, int orientation = +1);

  /// One-leaf model: every direction tangential, q = 0.
  static std::shared_ptr<const FoliatedTorusModel> one_leaf(int n);

  /// Product geometry on T^{n_a + n_b}; tangential frame is the two
  /// embedded tangential frames, first factor first.
  static std::shared_ptr<const FoliatedTorusModel> product(
      const std::shared_ptr<const FoliatedTorusModel>& a,
      const std::shared_ptr<const FoliatedTorusModel>& b);

  int ambient_dim() const { return n_; }
  int leaf_dim() const { return p_; }
  int transverse_dim() const { return q_; }
  int orientation() const { return orientation_; }

  const Eigen::MatrixXd& tangential_frame() const { return W_; }  // n x p
  const Eigen::MatrixXd& transverse_frame() const { return U_; }  // n x q
  Eigen::VectorXd tangential_vector(int j) const { return W_.col(j); }
  Eigen::VectorXd transverse_vector(int j) const { return U_.col(j); }

  /// Orthogonal projectors onto the tangential / transverse subspaces.
  Eigen::MatrixXd leafwise_projector() const { return W_ * W_.transpose(); }
  Eigen::MatrixXd transverse_projector() const { return U_ * U_.transpose(); }

  /// Injectivity radius of the flat exponential; regularization scales
  /// must keep bump supports inside it.
  double injectivity_radius() const { return 0.5; }

  bool same_geometry(const FoliatedTorusModel& o) const {
    return n_ == o.n_ && p_ == o.p_ && q_ == o.q_ && orientation_ == o.orientation_ &&
           W_ == o.W_ && U_ == o.U_;
  }

  nlohmann::json to_json() const;
  static std::shared_ptr<const FoliatedTorusModel> from_json(const nlohmann::json& j);

 private:
  FoliatedTorusModel(int n, int p, Eigen::MatrixXd W, Eigen::MatrixXd U, int orientation);

  int n_, p_, q_;
  Eigen::MatrixXd W_, U_;
  int orientation_;
};

using ModelPtr = std::shared_ptr<const FoliatedTorusModel>;

/// Componentwise fractional part, mapping into [0,1)^n.
Eigen::VectorXd torus_wrap(const Eigen::VectorXd& x);

/// Flat exponential map: exp_x(xi) = x + xi mod 1.
Eigen::VectorXd exp_map(const FoliatedTorusModel& model, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& xi);

/// Parallel transport of the flat foliated Riemannian connection along any
/// path: the identity in the global frame.
Eigen::MatrixXd parallel_transport(const FoliatedTorusModel& model,
                                   const std::vector<Eigen::VectorXd>& path);

}  // namespace leafcalc
