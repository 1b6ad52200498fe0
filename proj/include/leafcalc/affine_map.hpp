#pragma once

#include "leafcalc/form.hpp"
#include "leafcalc/smith.hpp"
#include "leafcalc/torus_model.hpp"

namespace leafcalc {

/// Affine self-map of flat tori, x -> B x + c mod 1, with B integral so the
/// map descends to the torus. Foliatedness means B maps the domain
/// tangential subspace into the codomain one.
class AffineFoliatedMap {
 public:
  AffineFoliatedMap(ModelPtr domain, ModelPtr codomain, IntMatrix b, Eigen::VectorXd c);

  static AffineFoliatedMap identity(ModelPtr model);
  static AffineFoliatedMap translation(ModelPtr model, const Eigen::VectorXd& c);
  static AffineFoliatedMap linear(ModelPtr model, const IntMatrix& b);

  const ModelPtr& domain() const { return domain_; }
  const ModelPtr& codomain() const { return codomain_; }
  const IntMatrix& linear_part() const { return b_; }
  const Eigen::VectorXd& translation_part() const { return c_; }

  Eigen::MatrixXd linear_part_double() const { return b_.cast<double>(); }
  bool invertible() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Tangential block of B expressed in the frames: W_cod^T B W_dom.
  Eigen::MatrixXd tangential_block() const;
  /// Induced map on the transverse quotient in the u-frames.
  Eigen::MatrixXd transverse_block() const;

 private:
  ModelPtr domain_, codomain_;
  IntMatrix b_;
  Eigen::VectorXd c_;
};

struct FoliatedMapCheck {
  bool foliated = false;
  double residual = 0.0;  // sup norm of the transverse leak of B W_dom
};

/// True iff B maps the domain leafwise span into the codomain one
/// (residual below 1e-12).
FoliatedMapCheck check_foliated_map(const AffineFoliatedMap& f);

/// g after f.
AffineFoliatedMap compose(const AffineFoliatedMap& g, const AffineFoliatedMap& f);

/// Pullback of a tangential form: mode m goes to B^T m with the phase
/// e^{2 pi i m . c}; frame components transform by the exterior powers of
/// the tangential block. Throws if the map is not foliated.
TangentialForm pullback(const AffineFoliatedMap& f, const TangentialForm& omega);

}  // namespace leafcalc
