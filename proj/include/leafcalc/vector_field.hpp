#pragma once

#include <vector>

#include "leafcalc/form.hpp"
#include "leafcalc/torus_model.hpp"

namespace leafcalc {

/// Smooth vector field on a flat foliated torus with trigonometric-polynomial
/// components, one degree-0 form per ambient coordinate. A field is foliated
/// when its transverse components are constant along the leaves.
class FoliatedVectorField {
 public:
  FoliatedVectorField(ModelPtr model, std::vector<TangentialForm> components);

  static FoliatedVectorField constant(ModelPtr model, const Eigen::VectorXd& v);
  /// The gradient-type field (sin 2 pi x_1, ..., sin 2 pi x_n) / (2 pi).
  static FoliatedVectorField morse(ModelPtr model);

  const ModelPtr& model() const { return model_; }
  const TangentialForm& component(int i) const { return components_[static_cast<std::size_t>(i)]; }
  const std::vector<TangentialForm>& components() const { return components_; }

  bool foliated() const { return foliated_; }
  double foliated_residual() const { return foliated_residual_; }

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  FoliatedVectorField project_leafwise() const;
  FoliatedVectorField project_transverse() const;
  FoliatedVectorField operator+(const FoliatedVectorField& o) const;
  FoliatedVectorField operator*(double s) const;
  /// Pointwise scaling by a scalar function.
  FoliatedVectorField scaled_by(const TangentialForm& f) const;

 private:
  ModelPtr model_;
  std::vector<TangentialForm> components_;
  bool foliated_ = false;
  double foliated_residual_ = 0.0;
};

/// Full ambient partial derivative of a scalar Fourier function
/// (multiplication by 2 pi i m_i).
TangentialForm ambient_partial(const TangentialForm& f, int i);

/// X(f) for a scalar function f.
TangentialForm directional_derivative(const FoliatedVectorField& x, const TangentialForm& f);

/// Lie bracket [X, Y].
FoliatedVectorField bracket(const FoliatedVectorField& x, const FoliatedVectorField& y);

/// Pointwise metric pairing <X, Y> as a scalar function.
TangentialForm field_inner(const FoliatedVectorField& x, const FoliatedVectorField& y);

/// Foliated covariant derivative nabla_X Y of the flat bundle-like metric,
/// evaluated through the defining 12-term Koszul-type identity (split into
/// leafwise and transverse halves). Y must be foliated.
FoliatedVectorField covariant_derivative(const FoliatedVectorField& x,
                                         const FoliatedVectorField& y);

}  // namespace leafcalc
