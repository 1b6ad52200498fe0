#pragma once

#include <complex>
#include <map>
#include <random>

#include "leafcalc/lattice.hpp"
#include "leafcalc/torus_model.hpp"

namespace leafcalc {

using Complex = std::complex<double>;

struct TermKey {
  LatticeMode mode;
  IndexSet idx;
  friend auto operator<=>(const TermKey&, const TermKey&) = default;
};

/// Degree-k leafwise form on a flat foliated torus, stored as a finite
/// table of Fourier coefficients: sum over (m, I) of c_{m,I} e_m theta^I
/// where e_m(x) = exp(2 pi i <m,x>) and theta^1..theta^p is the coframe
/// dual to the model's tangential frame.
class TangentialForm {
 public:
  TangentialForm(ModelPtr model, int degree);

  static TangentialForm zero(ModelPtr model, int degree) { return TangentialForm(model, degree); }
  static TangentialForm constant(ModelPtr model, Complex value);
  /// e_m as a degree-0 form (complex exponential, not real on its own).
  static TangentialForm fourier_mode(ModelPtr model, const LatticeMode& m);
  /// cos(2 pi <m,x>) as a real degree-0 form.
  static TangentialForm cosine_mode(ModelPtr model, const LatticeMode& m);
  static TangentialForm sine_mode(ModelPtr model, const LatticeMode& m);
  /// theta^I, constant frame form of degree |I|.
  static TangentialForm frame_form(ModelPtr model, IndexSet I);
  /// vol_F = theta^1 ^ ... ^ theta^p.
  static TangentialForm volume_form(ModelPtr model);

  const ModelPtr& model() const { return model_; }
  int degree() const { return degree_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool real_flagged() const { return real_flag_; }

  const std::map<TermKey, Complex>& terms() const { return terms_; }
  Complex coefficient(const LatticeMode& m, IndexSet I) const;
  void set_coefficient(const LatticeMode& m, IndexSet I, Complex c);
  void add_term(const LatticeMode& m, IndexSet I, Complex c);

  /// Drops terms below the magnitude floor; returns *this.
  TangentialForm& prune(double floor = kPruneFloor);
  /// Recomputes the reality flag from the coefficient table.
  bool check_reality(double tol = 1e-12) const;
  void set_real_flag(bool f) { real_flag_ = f; }

  TangentialForm operator+(const TangentialForm& o) const;
  TangentialForm operator-(const TangentialForm& o) const;
  TangentialForm operator*(Complex s) const;
  TangentialForm operator*(double s) const { return (*this) * Complex(s, 0.0); }

  double max_coefficient_magnitude() const;

  /// Pointwise value of the component of theta^I at x.
  Complex evaluate_component(IndexSet I, const Eigen::VectorXd& x) const;
  /// All components at x, keyed by index set.
  std::map<IndexSet, Complex> evaluate(const Eigen::VectorXd& x) const;

  nlohmann::json to_json() const;
  static TangentialForm from_json(ModelPtr model, const nlohmann::json& j);

 private:
  ModelPtr model_;
  int degree_;
  std::map<TermKey, Complex> terms_;
  bool real_flag_ = true;
};

enum class DegreeOverflow { kError, kZero };

/// Graded-commutative wedge product; mode indices add, index sets merge
/// with the shuffle sign.
TangentialForm wedge(const TangentialForm& a, const TangentialForm& b,
                     DegreeOverflow policy = DegreeOverflow::kError);

/// Leafwise exterior derivative: per mode m and frame vector w_j the term
/// picks up 2 pi i <m, w_j> wedged with theta^j. Degree p input maps to
/// the exact zero form.
TangentialForm exterior_derivative(const TangentialForm& a);

/// Tangential Hodge star for the orthonormal frame and the model's
/// orientation: theta^I -> sign(I, I^c) theta^{I^c}.
TangentialForm hodge_star(const TangentialForm& a);

/// Codifferential (-1)^{p(k-1)+1} star d star on degree-k input.
TangentialForm codifferential(const TangentialForm& a);

/// d delta + delta d; diagonal in the Fourier basis with eigenvalue
/// 4 pi^2 sum_j <m, w_j>^2.
TangentialForm laplacian(const TangentialForm& a);

/// L^2 inner product; by Parseval this is the sum over matching terms of
/// coefficient times conjugate coefficient (real for real forms).
double l2_inner(const TangentialForm& a, const TangentialForm& b);

/// Integration of a degree-p form against the transversal volume: the
/// mode-0 coefficient of the frame volume component.
double integrate_volq(const TangentialForm& a);

/// Uniform random real form with sparse support, for property tests.
TangentialForm random_real_form(ModelPtr model, int degree, int terms, int max_mode,
                                std::mt19937_64& rng);

}  // namespace leafcalc
