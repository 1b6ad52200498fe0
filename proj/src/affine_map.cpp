#include "leafcalc/affine_map.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leafcalc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFoliatedTol = 1e-12;
}  // namespace

AffineFoliatedMap::AffineFoliatedMap(ModelPtr domain, ModelPtr codomain, IntMatrix b,
                                     Eigen::VectorXd c)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), b_(std::move(b)),
      c_(std::move(c)) {
  if (!domain_ || !codomain_) throw std::invalid_argument("affine map: null model");
  if (b_.rows() != codomain_->ambient_dim() || b_.cols() != domain_->ambient_dim())
    throw std::invalid_argument("affine map: linear part shape mismatch");
  if (c_.size() != codomain_->ambient_dim())
    throw std::invalid_argument("affine map: translation size mismatch");
}

AffineFoliatedMap AffineFoliatedMap::identity(ModelPtr model) {
  int n = model->ambient_dim();
  return AffineFoliatedMap(model, model, IntMatrix::Identity(n, n), Eigen::VectorXd::Zero(n));
}

AffineFoliatedMap AffineFoliatedMap::translation(ModelPtr model, const Eigen::VectorXd& c) {
  int n = model->ambient_dim();
  return AffineFoliatedMap(model, model, IntMatrix::Identity(n, n), c);
}

AffineFoliatedMap AffineFoliatedMap::linear(ModelPtr model, const IntMatrix& b) {
  int n = model->ambient_dim();
  return AffineFoliatedMap(model, model, b, Eigen::VectorXd::Zero(n));
}

bool AffineFoliatedMap::invertible() const {
  if (b_.rows() != b_.cols()) return false;
  return std::abs(integer_determinant(b_)) == 1;
}

Eigen::VectorXd AffineFoliatedMap::apply(const Eigen::VectorXd& x) const {
  return torus_wrap(b_.cast<double>() * x + c_);
}

Eigen::MatrixXd AffineFoliatedMap::tangential_block() const {
  return codomain_->tangential_frame().transpose() * b_.cast<double>() *
         domain_->tangential_frame();
}

Eigen::MatrixXd AffineFoliatedMap::transverse_block() const {
  return codomain_->transverse_frame().transpose() * b_.cast<double>() *
         domain_->transverse_frame();
}

FoliatedMapCheck check_foliated_map(const AffineFoliatedMap& f) {
  const auto& cod = *f.codomain();
  Eigen::MatrixXd bw = f.linear_part_double() * f.domain()->tangential_frame();
  Eigen::MatrixXd leak = bw - cod.leafwise_projector() * bw;
  FoliatedMapCheck r;
  r.residual = leak.size() == 0 ? 0.0 : leak.cwiseAbs().maxCoeff();
  r.foliated = r.residual < kFoliatedTol;
  return r;
}

AffineFoliatedMap compose(const AffineFoliatedMap& g, const AffineFoliatedMap& f) {
  if (f.codomain() != g.domain() && !f.codomain()->same_geometry(*g.domain()))
    throw std::invalid_argument("compose: inner codomain does not match outer domain");
  IntMatrix b = g.linear_part() * f.linear_part();
  Eigen::VectorXd c = g.linear_part_double() * f.translation_part() + g.translation_part();
  return AffineFoliatedMap(f.domain(), g.codomain(), std::move(b), std::move(c));
}

TangentialForm pullback(const AffineFoliatedMap& f, const TangentialForm& omega) {
  if (omega.model() != f.codomain() && !omega.model()->same_geometry(*f.codomain()))
    throw std::invalid_argument("pullback: form does not live on the codomain");
  auto check = check_foliated_map(f);
  if (!check.foliated)
    throw std::invalid_argument("pullback: map is not foliated (tangential subspace leaks)");

  const int p_dom = f.domain()->leaf_dim();
  const int k = omega.degree();
  if (k > p_dom) throw std::invalid_argument("pullback: degree exceeds domain leaf dimension");

  Eigen::MatrixXd g = f.tangential_block();  // p_cod x p_dom
  auto dom_sets = index_sets_of_degree(p_dom, k);

  TangentialForm r(f.domain(), k);
  const auto& bt = f.linear_part();
  for (const auto& [key, c] : omega.terms()) {
    LatticeMode m2(f.domain()->ambient_dim());
    for (int i = 0; i < f.domain()->ambient_dim(); ++i) {
      std::int64_t acc = 0;
      for (int j = 0; j < f.codomain()->ambient_dim(); ++j) acc += bt(j, i) * key.mode[j];
      m2[i] = acc;  // B^T m
    }
    double phase = kTwoPi * dot(key.mode, f.translation_part());
    Complex ph(std::cos(phase), std::sin(phase));

    auto rows = key.idx.elements();
    for (IndexSet I : dom_sets) {
      auto cols = I.elements();
      Eigen::MatrixXd minor(k, k);
      for (int a = 0; a < k; ++a)
        for (int b2 = 0; b2 < k; ++b2) minor(a, b2) = g(rows[a], cols[b2]);
      double det = (k == 0) ? 1.0 : small_determinant(minor);
      if (det == 0.0) continue;
      r.add_term(m2, I, c * ph * det);
    }
  }
  r.set_real_flag(omega.real_flagged());
  r.prune();
  return r;
}

}  // namespace leafcalc
