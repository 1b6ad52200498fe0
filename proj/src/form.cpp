#include "leafcalc/form.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leafcalc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_model(const TangentialForm& a, const TangentialForm& b) {
  if (a.model() != b.model() && !a.model()->same_geometry(*b.model()))
    throw std::invalid_argument("forms live on different models");
}

}  // namespace

TangentialForm::TangentialForm(ModelPtr model, int degree)
    : model_(std::move(model)), degree_(degree) {
  if (!model_) throw std::invalid_argument("form: null model");
  if (degree_ < 0 || degree_ > model_->leaf_dim())
    throw std::invalid_argument("form: degree out of range");
}

TangentialForm TangentialForm::constant(ModelPtr model, Complex value) {
  TangentialForm f(model, 0);
  f.add_term(LatticeMode::zero(model->ambient_dim()), IndexSet::empty(), value);
  f.real_flag_ = std::abs(value.imag()) == 0.0;
  return f;
}

TangentialForm TangentialForm::fourier_mode(ModelPtr model, const LatticeMode& m) {
  TangentialForm f(model, 0);
  f.add_term(m, IndexSet::empty(), Complex(1.0, 0.0));
  f.real_flag_ = m.is_zero();
  return f;
}

TangentialForm TangentialForm::cosine_mode(ModelPtr model, const LatticeMode& m) {
  TangentialForm f(model, 0);
  f.add_term(m, IndexSet::empty(), Complex(0.5, 0.0));
  f.add_term(-m, IndexSet::empty(), Complex(0.5, 0.0));
  return f;
}

TangentialForm TangentialForm::sine_mode(ModelPtr model, const LatticeMode& m) {
  TangentialForm f(model, 0);
  f.add_term(m, IndexSet::empty(), Complex(0.0, -0.5));
  f.add_term(-m, IndexSet::empty(), Complex(0.0, 0.5));
  return f;
}

TangentialForm TangentialForm::frame_form(ModelPtr model, IndexSet I) {
  TangentialForm f(model, I.degree());
  f.add_term(LatticeMode::zero(model->ambient_dim()), I, Complex(1.0, 0.0));
  return f;
}

TangentialForm TangentialForm::volume_form(ModelPtr model) {
  return frame_form(model, IndexSet::full(model->leaf_dim()));
}

Complex TangentialForm::coefficient(const LatticeMode& m, IndexSet I) const {
  auto it = terms_.find(TermKey{m, I});
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

void TangentialForm::set_coefficient(const LatticeMode& m, IndexSet I, Complex c) {
  if (I.degree() != degree_) throw std::invalid_argument("form: index set degree mismatch");
  if (m.dim != model_->ambient_dim()) throw std::invalid_argument("form: mode dimension mismatch");
  if (c == Complex(0.0, 0.0))
    terms_.erase(TermKey{m, I});
  else
    terms_[TermKey{m, I}] = c;
}

void TangentialForm::add_term(const LatticeMode& m, IndexSet I, Complex c) {
  if (I.degree() != degree_) throw std::invalid_argument("form: index set degree mismatch");
  if (m.dim != model_->ambient_dim()) throw std::invalid_argument("form: mode dimension mismatch");
  auto [it, inserted] = terms_.try_emplace(TermKey{m, I}, c);
  if (!inserted) it->second += c;
}

TangentialForm& TangentialForm::prune(double floor) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < floor)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

bool TangentialForm::check_reality(double tol) const {
  for (const auto& [key, c] : terms_) {
    Complex mirror = coefficient(-key.mode, key.idx);
    if (std::abs(mirror - std::conj(c)) > tol) return false;
  }
  return true;
}

TangentialForm TangentialForm::operator+(const TangentialForm& o) const {
  require_same_model(*this, o);
  if (degree_ != o.degree_) throw std::invalid_argument("form: degree mismatch in sum");
  TangentialForm r = *this;
  for (const auto& [key, c] : o.terms_) {
    auto [it, inserted] = r.terms_.try_emplace(key, c);
    if (!inserted) it->second += c;
  }
  r.real_flag_ = real_flag_ && o.real_flag_;
  r.prune();
  return r;
}

TangentialForm TangentialForm::operator-(const TangentialForm& o) const {
  return (*this) + o * Complex(-1.0, 0.0);
}

TangentialForm TangentialForm::operator*(Complex s) const {
  TangentialForm r(model_, degree_);
  for (const auto& [key, c] : terms_) r.terms_[key] = c * s;
  r.real_flag_ = real_flag_ && std::abs(s.imag()) == 0.0;
  r.prune();
  return r;
}

double TangentialForm::max_coefficient_magnitude() const {
  double m = 0.0;
  for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Complex TangentialForm::evaluate_component(IndexSet I, const Eigen::VectorXd& x) const {
  Complex acc(0.0, 0.0);
  for (const auto& [key, c] : terms_) {
    if (key.idx != I) continue;
    double phase = kTwoPi * dot(key.mode, x);
    acc += c * Complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

std::map<IndexSet, Complex> TangentialForm::evaluate(const Eigen::VectorXd& x) const {
  std::map<IndexSet, Complex> out;
  for (const auto& [key, c] : terms_) {
    double phase = kTwoPi * dot(key.mode, x);
    out[key.idx] += c * Complex(std::cos(phase), std::sin(phase));
  }
  return out;
}

nlohmann::json TangentialForm::to_json() const {
  nlohmann::json j;
  j["degree"] = degree_;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [key, c] : terms_) {
    nlohmann::json t;
    nlohmann::json mode = nlohmann::json::array();
    for (int i = 0; i < key.mode.dim; ++i) mode.push_back(key.mode[i]);
    nlohmann::json index = nlohmann::json::array();
    for (int e : key.idx.elements()) index.push_back(e + 1);  // 1-based frame indices
    t["mode"] = mode;
    t["index"] = index;
    t["re"] = c.real();
    t["im"] = c.imag();
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j;
}

TangentialForm TangentialForm::from_json(ModelPtr model, const nlohmann::json& j) {
  TangentialForm f(model, j.at("degree").get<int>());
  for (const auto& t : j.at("terms")) {
    LatticeMode m(model->ambient_dim());
    int i = 0;
    for (const auto& v : t.at("mode")) m[i++] = v.get<std::int64_t>();
    if (i != model->ambient_dim()) throw std::invalid_argument("form json: mode length mismatch");
    IndexSet I;
    for (const auto& v : t.at("index")) I.bits |= 1u << (v.get<int>() - 1);
    f.add_term(m, I, Complex(t.at("re").get<double>(), t.at("im").get<double>()));
  }
  f.set_real_flag(f.check_reality());
  return f;
}

TangentialForm wedge(const TangentialForm& a, const TangentialForm& b, DegreeOverflow policy) {
  require_same_model(a, b);
  const int p = a.model()->leaf_dim();
  const int deg = a.degree() + b.degree();
  if (deg > p) {
    if (policy == DegreeOverflow::kError)
      throw std::invalid_argument("wedge: degree overflow beyond leaf dimension");
    return TangentialForm::zero(a.model(), p);
  }
  TangentialForm r(a.model(), deg);
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      int sign = wedge_sign(ka.idx, kb.idx);
      if (sign == 0) continue;
      r.add_term(ka.mode + kb.mode, ka.idx.set_union(kb.idx),
                 static_cast<double>(sign) * ca * cb);
    }
  r.set_real_flag(a.real_flagged() && b.real_flagged());
  r.prune();
  return r;
}

TangentialForm exterior_derivative(const TangentialForm& a) {
  const auto& model = *a.model();
  const int p = model.leaf_dim();
  if (a.degree() == p) return TangentialForm::zero(a.model(), p);

  TangentialForm r(a.model(), a.degree() + 1);
  for (const auto& [key, c] : a.terms()) {
    for (int j = 0; j < p; ++j) {
      if (key.idx.contains(j)) continue;
      double mw = dot(key.mode, model.tangential_vector(j));
      if (mw == 0.0) continue;
      int sign = wedge_sign(IndexSet::single(j), key.idx);
      // d contributes 2 pi i <m,w_j> theta^j ^ theta^I
      Complex factor = Complex(0.0, kTwoPi * mw) * static_cast<double>(sign);
      r.add_term(key.mode, key.idx.set_union(IndexSet::single(j)), factor * c);
    }
  }
  r.set_real_flag(a.real_flagged());
  r.prune();
  return r;
}

TangentialForm hodge_star(const TangentialForm& a) {
  const auto& model = *a.model();
  const int p = model.leaf_dim();
  TangentialForm r(a.model(), p - a.degree());
  const double orient = static_cast<double>(model.orientation());
  for (const auto& [key, c] : a.terms()) {
    int sign = complement_sign(key.idx, p);
    r.add_term(key.mode, key.idx.complement(p), orient * static_cast<double>(sign) * c);
  }
  r.set_real_flag(a.real_flagged());
  return r;
}

TangentialForm codifferential(const TangentialForm& a) {
  const int p = a.model()->leaf_dim();
  const int k = a.degree();
  if (k == 0) return TangentialForm::zero(a.model(), 0);
  // delta on degree k carries the sign (-1)^{p(k-1)+1}
  double sign = ((p * (k - 1) + 1) % 2 == 0) ? 1.0 : -1.0;
  return hodge_star(exterior_derivative(hodge_star(a))) * sign;
}

TangentialForm laplacian(const TangentialForm& a) {
  const int p = a.model()->leaf_dim();
  const int k = a.degree();
  TangentialForm r = TangentialForm::zero(a.model(), k);
  if (k < p) r = r + codifferential(exterior_derivative(a));
  if (k > 0) r = r + exterior_derivative(codifferential(a));
  return r;
}

double l2_inner(const TangentialForm& a, const TangentialForm& b) {
  require_same_model(a, b);
  if (a.degree() != b.degree()) throw std::invalid_argument("l2_inner: degree mismatch");
  Complex acc(0.0, 0.0);
  const auto& big = a.term_count() > b.term_count() ? a : b;
  const auto& small = a.term_count() > b.term_count() ? b : a;
  for (const auto& [key, c] : small.terms()) {
    Complex other = big.coefficient(key.mode, key.idx);
    if (&small == &a)
      acc += c * std::conj(other);
    else
      acc += other * std::conj(c);
  }
  return acc.real();
}

double integrate_volq(const TangentialForm& a) {
  const int p = a.model()->leaf_dim();
  if (a.degree() != p) throw std::invalid_argument("integrate_volq: degree must equal leaf dim");
  Complex c = a.coefficient(LatticeMode::zero(a.model()->ambient_dim()), IndexSet::full(p));
  return c.real();
}

TangentialForm random_real_form(ModelPtr model, int degree, int terms, int max_mode,
                                std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> mode_dist(-max_mode, max_mode);
  std::uniform_real_distribution<double> coeff_dist(-1.0, 1.0);
  auto index_sets = index_sets_of_degree(model->leaf_dim(), degree);
  std::uniform_int_distribution<std::size_t> idx_dist(0, index_sets.size() - 1);

  TangentialForm f(model, degree);
  for (int t = 0; t < terms; ++t) {
    LatticeMode m(model->ambient_dim());
    for (int i = 0; i < model->ambient_dim(); ++i) m[i] = mode_dist(rng);
    IndexSet I = index_sets[idx_dist(rng)];
    Complex c(coeff_dist(rng), coeff_dist(rng));
    if (m.is_zero()) c = Complex(c.real(), 0.0);
    f.add_term(m, I, c);
    f.add_term(-m, I, std::conj(c));
  }
  f.set_real_flag(true);
  f.prune();
  return f;
}

}  // namespace leafcalc
