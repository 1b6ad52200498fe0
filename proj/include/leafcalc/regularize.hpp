#pragma once

#include <variant>
#include <vector>

#include "leafcalc/form.hpp"
#include "leafcalc/subtorus.hpp"

namespace leafcalc {

/// Orientation bookkeeping of the regularization operators, kept in one
/// place and audited by the closed-form intersection tests.
namespace signs {
inline int parity(int e) { return (e % 2 == 0) ? 1 : -1; }
/// R'_nu converges to this multiple of the identity on degree-k forms.
inline int rprime(int p, int k) { return parity(p * k); }
/// Coefficient of the smeared conormal frame form of a dimension-k current.
inline int current_normal(int k) { return parity(k); }
/// Prefactor of the intersection pairing <S, R_nu T ^ ->.
inline int intersection_prefactor(int p, int l) { return parity(p * l); }
/// Sign of the transversal closed form S . T = sign h (S cap T).
inline int closed_form(int p, int k, int l) { return parity(k * (p - k) + l * (p - l)); }
}  // namespace signs

/// Smooth cutoff: 1 on [0,1/3], 0 on [2/3,inf), glued with exponential
/// splines.
class BumpProfile {
 public:
  double operator()(double s) const;
};

/// Unit-mass radial kernel on R^dim: nu^dim rho(nu r) / Z_dim, supported in
/// the ball of radius (2/3)/nu. Dimension zero is the empty product (the
/// constant 1, no smearing directions).
class RadialBumpKernel {
 public:
  RadialBumpKernel(int dim, double nu);
  int dim() const { return dim_; }
  double nu() const { return nu_; }
  double support_radius() const { return (2.0 / 3.0) / nu_; }
  double density(double r) const;

 private:
  int dim_;
  double nu_;
  double norm_;
};

/// Product bump representative of the tangential Thom class on the flat
/// tangent bundle: a normalized tangential factor supported in F M(1/nu)
/// wedged with the normalized transverse cutoff.
struct ThomBump {
  ModelPtr model;
  double nu = 2.0;
  RadialBumpKernel tangential;
  RadialBumpKernel transverse;

  double value(double r_tangential, double r_transverse) const {
    return tangential.density(r_tangential) * transverse.density(r_transverse);
  }
  /// Cartesian tensor-grid quadrature of the full fiber integral (the
  /// defining normalization; should be 1).
  double fiber_integral(int samples_per_axis = 48) const;
};

/// nu >= 2 keeps the support inside the injectivity radius.
ThomBump thom_bump_form(ModelPtr model, double nu);

/// Real tangential form sampled on a uniform n-dimensional grid, one scalar
/// field per frame index set.
class GridForm {
 public:
  GridForm(ModelPtr model, int degree, int resolution);
  static GridForm sample(const TangentialForm& f, int resolution);

  const ModelPtr& model() const { return model_; }
  int degree() const { return degree_; }
  int resolution() const { return resolution_; }
  std::int64_t cell_count() const { return cells_; }

  std::vector<double>& component(IndexSet I);
  const std::vector<double>& component(IndexSet I) const;
  const std::vector<IndexSet>& index_sets() const { return sets_; }

  /// Multilinear interpolation of one component at a torus point.
  double interpolate(IndexSet I, const Eigen::VectorXd& x) const;

  double max_abs() const;
  GridForm operator-(const GridForm& o) const;
  GridForm operator*(double s) const;
  GridForm operator+(const GridForm& o) const;

 private:
  ModelPtr model_;
  int degree_;
  int resolution_;
  std::int64_t cells_;
  std::vector<IndexSet> sets_;
  std::vector<std::vector<double>> data_;
};

/// Smoothing operator on forms: discrete convolution with the Thom-bump
/// kernel (renormalized to unit mass on the grid) times the sign
/// (-1)^{p deg}. Converges to (-1)^{p deg} times the identity.
GridForm smooth_form_rprime(const GridForm& w, double nu);

/// Current represented either by a linear subtorus with its foliated measure
/// or as the dual of a tangential form.
struct SubtorusCurrent {
  LinearSubtorus subtorus;
  int dimension() const { return subtorus.leaf_dim(); }
};
struct FormCurrent {
  TangentialForm form;  // pairs with forms of degree p - deg(form)
  int dimension() const { return form.model()->leaf_dim() - form.degree(); }
};
using GridCurrent = std::variant<SubtorusCurrent, FormCurrent>;

int current_dimension(const GridCurrent& c);

/// Smeared Poincare dual: for subtorus currents a bump across the normal
/// directions times the oriented conormal frame form; for form currents the
/// mollified form. Normalized so that
///   int_M  R_nu S ^ omega vol_Q  ->  (-1)^{p k} <S, omega>.
GridForm regularize_current(const GridCurrent& s, double nu, int resolution);

/// <S, alpha ^ eta> for a grid form alpha and an exact form eta, by
/// quadrature along the current.
double pair_current(const GridCurrent& s, const GridForm& alpha, const TangentialForm& eta,
                    int quad_per_axis);
/// <S, omega> for an exact form (termwise, no quadrature error) when S is a
/// subtorus; full-grid quadrature for form currents.
double pair_current_exact(const GridCurrent& s, const TangentialForm& omega);

struct IntersectionSequence {
  std::vector<double> nu_values;
  std::vector<double> pairings;       // (-1)^{pl} <S, R_nu T ^ eta> per nu
  double extrapolated = 0.0;
  double error_estimate = 0.0;
  bool converged = true;              // differences shrink along the sequence
};

/// Defining limit of the intersection product evaluated on a test form,
/// with a Richardson extrapolation in 1/nu.
IntersectionSequence intersection_product_numeric(const GridCurrent& s, const GridCurrent& t,
                                                  const TangentialForm& eta,
                                                  const std::vector<double>& nus, int resolution,
                                                  int quad_per_axis);

/// Transversal closed form: sign h <S cap T, eta> for subtorus currents
/// (zero when the intersection is empty), and the wedge current for form
/// currents.
double intersection_closed_form(const GridCurrent& s, const GridCurrent& t,
                                const TangentialForm& eta);

}  // namespace leafcalc
