#include "leafcalc/vector_field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leafcalc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFoliatedTol = 1e-12;
}  // namespace

FoliatedVectorField::FoliatedVectorField(ModelPtr model, std::vector<TangentialForm> components)
    : model_(std::move(model)), components_(std::move(components)) {
  const int n = model_->ambient_dim();
  if (static_cast<int>(components_.size()) != n)
    throw std::invalid_argument("vector field: one component per ambient coordinate");
  for (const auto& c : components_)
    if (c.degree() != 0) throw std::invalid_argument("vector field: components must be functions");

  // transverse components must not vary along the leaves
  foliated_residual_ = 0.0;
  for (int l = 0; l < model_->transverse_dim(); ++l) {
    Eigen::VectorXd u = model_->transverse_vector(l);
    TangentialForm f(model_, 0);
    for (int i = 0; i < n; ++i) f = f + components_[static_cast<std::size_t>(i)] * u(i);
    for (const auto& [key, c] : f.terms()) {
      for (int j = 0; j < model_->leaf_dim(); ++j) {
        double mw = std::abs(dot(key.mode, model_->tangential_vector(j)));
        if (std::abs(c) > 1e-13) foliated_residual_ = std::max(foliated_residual_, mw);
      }
    }
  }
  foliated_ = foliated_residual_ < kFoliatedTol;
}

FoliatedVectorField FoliatedVectorField::constant(ModelPtr model, const Eigen::VectorXd& v) {
  std::vector<TangentialForm> comps;
  for (int i = 0; i < model->ambient_dim(); ++i)
    comps.push_back(TangentialForm::constant(model, Complex(v(i), 0.0)));
  return FoliatedVectorField(model, std::move(comps));
}

FoliatedVectorField FoliatedVectorField::morse(ModelPtr model) {
  std::vector<TangentialForm> comps;
  const int n = model->ambient_dim();
  for (int i = 0; i < n; ++i) {
    LatticeMode m(n);
    m[i] = 1;
    comps.push_back(TangentialForm::sine_mode(model, m) * (1.0 / kTwoPi));
  }
  return FoliatedVectorField(model, std::move(comps));
}

Eigen::VectorXd FoliatedVectorField::evaluate(const Eigen::VectorXd& x) const {
  Eigen::VectorXd v(model_->ambient_dim());
  for (int i = 0; i < model_->ambient_dim(); ++i)
    v(i) = components_[static_cast<std::size_t>(i)].evaluate_component(IndexSet::empty(), x).real();
  return v;
}

Eigen::MatrixXd FoliatedVectorField::jacobian(const Eigen::VectorXd& x) const {
  const int n = model_->ambient_dim();
  Eigen::MatrixXd j(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& f = components_[static_cast<std::size_t>(i)];
    for (int col = 0; col < n; ++col) {
      Complex acc(0.0, 0.0);
      for (const auto& [key, c] : f.terms()) {
        double phase = kTwoPi * dot(key.mode, x);
        acc += c * Complex(0.0, kTwoPi * static_cast<double>(key.mode[col])) *
               Complex(std::cos(phase), std::sin(phase));
      }
      j(i, col) = acc.real();
    }
  }
  return j;
}

namespace {

FoliatedVectorField apply_projector(const FoliatedVectorField& f, const Eigen::MatrixXd& pr) {
  const int n = f.model()->ambient_dim();
  std::vector<TangentialForm> comps;
  for (int i = 0; i < n; ++i) {
    TangentialForm acc(f.model(), 0);
    for (int j = 0; j < n; ++j)
      if (pr(i, j) != 0.0) acc = acc + f.component(j) * pr(i, j);
    comps.push_back(acc);
  }
  return FoliatedVectorField(f.model(), std::move(comps));
}

}  // namespace

FoliatedVectorField FoliatedVectorField::project_leafwise() const {
  return apply_projector(*this, model_->leafwise_projector());
}

FoliatedVectorField FoliatedVectorField::project_transverse() const {
  return apply_projector(*this, model_->transverse_projector());
}

FoliatedVectorField FoliatedVectorField::operator+(const FoliatedVectorField& o) const {
  std::vector<TangentialForm> comps;
  for (int i = 0; i < model_->ambient_dim(); ++i)
    comps.push_back(components_[static_cast<std::size_t>(i)] + o.component(i));
  return FoliatedVectorField(model_, std::move(comps));
}

FoliatedVectorField FoliatedVectorField::operator*(double s) const {
  std::vector<TangentialForm> comps;
  for (const auto& c : components_) comps.push_back(c * s);
  return FoliatedVectorField(model_, std::move(comps));
}

FoliatedVectorField FoliatedVectorField::scaled_by(const TangentialForm& f) const {
  std::vector<TangentialForm> comps;
  for (const auto& c : components_) comps.push_back(wedge(f, c));
  return FoliatedVectorField(model_, std::move(comps));
}

TangentialForm ambient_partial(const TangentialForm& f, int i) {
  if (f.degree() != 0) throw std::invalid_argument("ambient_partial: function expected");
  TangentialForm r(f.model(), 0);
  for (const auto& [key, c] : f.terms())
    if (key.mode[i] != 0)
      r.add_term(key.mode, key.idx, c * Complex(0.0, kTwoPi * static_cast<double>(key.mode[i])));
  r.set_real_flag(f.real_flagged());
  r.prune();
  return r;
}

TangentialForm directional_derivative(const FoliatedVectorField& x, const TangentialForm& f) {
  TangentialForm acc(f.model(), 0);
  for (int i = 0; i < f.model()->ambient_dim(); ++i)
    acc = acc + wedge(x.component(i), ambient_partial(f, i));
  return acc;
}

FoliatedVectorField bracket(const FoliatedVectorField& x, const FoliatedVectorField& y) {
  const int n = x.model()->ambient_dim();
  std::vector<TangentialForm> comps;
  for (int i = 0; i < n; ++i)
    comps.push_back(directional_derivative(x, y.component(i)) -
                    directional_derivative(y, x.component(i)));
  return FoliatedVectorField(x.model(), std::move(comps));
}

TangentialForm field_inner(const FoliatedVectorField& x, const FoliatedVectorField& y) {
  TangentialForm acc(x.model(), 0);
  for (int i = 0; i < x.model()->ambient_dim(); ++i)
    acc = acc + wedge(x.component(i), y.component(i));
  return acc;
}

FoliatedVectorField covariant_derivative(const FoliatedVectorField& x,
                                         const FoliatedVectorField& y) {
  if (!y.foliated())
    throw std::invalid_argument("covariant_derivative: Y must be a foliated field");
  if (x.model() != y.model() && !x.model()->same_geometry(*y.model()))
    throw std::invalid_argument("covariant_derivative: model mismatch");
  const auto& model = x.model();
  const int n = model->ambient_dim();

  auto xf = x.project_leafwise();
  auto xq = x.project_transverse();
  auto yf = y.project_leafwise();
  auto yq = y.project_transverse();

  std::vector<TangentialForm> comps;
  for (int l = 0; l < n; ++l) {
    auto z = FoliatedVectorField::constant(model, Eigen::VectorXd::Unit(n, l));
    auto zf = z.project_leafwise();
    auto zq = z.project_transverse();

    TangentialForm acc(model, 0);
    // leafwise half
    acc = acc + directional_derivative(x, field_inner(yf, zf));
    acc = acc + directional_derivative(yf, field_inner(zf, x));
    acc = acc - directional_derivative(zf, field_inner(yf, x));
    acc = acc + field_inner(x, bracket(zf, yf));
    acc = acc + field_inner(yf, bracket(zf, x));
    acc = acc - field_inner(zf, bracket(yf, x));
    // transverse half
    acc = acc + directional_derivative(xq, field_inner(yq, zq));
    acc = acc + directional_derivative(yq, field_inner(zq, xq));
    acc = acc - directional_derivative(zq, field_inner(yq, xq));
    acc = acc + field_inner(xq, bracket(zq, yq));
    acc = acc + field_inner(yq, bracket(zq, xq));
    acc = acc - field_inner(zq, bracket(yq, xq));

    comps.push_back(acc * 0.5);
  }
  return FoliatedVectorField(model, std::move(comps));
}

}  // namespace leafcalc
