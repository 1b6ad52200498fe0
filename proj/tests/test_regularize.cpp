#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "leafcalc/regularize.hpp"

using namespace leafcalc;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

ModelPtr one_leaf_t2() { return FoliatedTorusModel::one_leaf(2); }

ModelPtr kronecker_model() {
  Eigen::VectorXd d(2);
  d << 1.0, kGolden;
  return FoliatedTorusModel::from_directions(2, {d});
}

ModelPtr t3_line_model() {
  Eigen::VectorXd d(3);
  d << 1.0, 0.0, 0.0;
  return FoliatedTorusModel::from_directions(3, {d});
}

LatticeMode mode_of(ModelPtr m, std::initializer_list<std::int64_t> entries) {
  LatticeMode mode(m->ambient_dim());
  int i = 0;
  for (auto e : entries) mode[i++] = e;
  return mode;
}

IntVector ivec(std::initializer_list<std::int64_t> entries) {
  IntVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (auto e : entries) v(i++) = e;
  return v;
}

// (1 + cos 2 pi x_i)^2 / 4 factors multiplied: equals 1 at the origin,
// band limited with modes up to 2
TangentialForm window_bump(ModelPtr m) {
  auto f = TangentialForm::constant(m, Complex(1.0, 0.0));
  for (int i = 0; i < m->ambient_dim(); ++i) {
    LatticeMode mi(m->ambient_dim());
    mi[i] = 1;
    auto factor = (TangentialForm::constant(m, Complex(0.5, 0.0)) +
                   TangentialForm::cosine_mode(m, mi) * 0.5);
    f = wedge(wedge(f, factor), factor);
  }
  return f;
}

// measured multiplier of a smoothing operator on the sampled mode
double measured_multiplier(const GridForm& in, const GridForm& out, IndexSet I) {
  const auto& a = in.component(I);
  const auto& b = out.component(I);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * b[i];
    den += a[i] * a[i];
  }
  return num / den;
}

}  // namespace

TEST_CASE("bump profile: plateau, support, range") {
  BumpProfile rho;
  CHECK(rho(0.0) == 1.0);
  CHECK(rho(1.0 / 3.0) == 1.0);
  CHECK(rho(2.0 / 3.0) == 0.0);
  CHECK(rho(1.0) == 0.0);
  for (double s = 0.0; s <= 1.0; s += 0.01) {
    CHECK(rho(s) >= 0.0);
    CHECK(rho(s) <= 1.0);
  }
  CHECK(rho(0.45) > 0.0);
  CHECK(rho(0.45) < 1.0);
}

TEST_CASE("thom bump: unit fiber integral and support radius") {
  for (ModelPtr m : {one_leaf_t2(), kronecker_model(), t3_line_model()}) {
    for (double nu : {4.0, 8.0, 16.0}) {
      auto bump = thom_bump_form(m, nu);
      CHECK(std::abs(bump.fiber_integral(160) - 1.0) < 1e-8);
      // support inside radius (2/3)/nu in both factors
      double r = bump.tangential.support_radius();
      CHECK(bump.tangential.density(r * 1.0001) == 0.0);
      if (m->transverse_dim() > 0) CHECK(bump.transverse.density(r * 1.0001) == 0.0);
    }
  }
  // q = 0: the transverse factor is the empty product
  auto flat = thom_bump_form(one_leaf_t2(), 4.0);
  CHECK(flat.transverse.density(0.123) == 1.0);
  CHECK_THROWS_AS(thom_bump_form(one_leaf_t2(), 1.5), std::invalid_argument);
}

TEST_CASE("smoothing preserves constants exactly") {
  auto m = one_leaf_t2();
  auto grid = GridForm::sample(TangentialForm::constant(m, Complex(0.75, 0.0)), 128);
  for (double nu : {4.0, 8.0, 32.0}) {
    auto out = smooth_form_rprime(grid, nu);
    CHECK(std::abs(out.max_abs() - 0.75) < 1e-8);
    double dev = 0.0;
    for (double v : out.component(IndexSet::empty()))
      dev = std::max(dev, std::abs(v - 0.75));
    CHECK(dev < 1e-8);
  }
  CHECK_THROWS_AS(smooth_form_rprime(grid, 64.0), std::invalid_argument);  // under-resolved
}

TEST_CASE("single-mode multiplier converges to 1 for functions") {
  auto m = one_leaf_t2();
  auto em = TangentialForm::cosine_mode(m, mode_of(m, {1, 0}));
  auto grid = GridForm::sample(em, 128);
  double prev_err = 2.0;
  for (double nu : {4.0, 8.0, 16.0, 32.0}) {
    auto out = smooth_form_rprime(grid, nu);
    double mult = measured_multiplier(grid, out, IndexSet::empty());
    double err = std::abs(mult - 1.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 5e-2);
}

TEST_CASE("smoothing multiplier carries the sign (-1)^{p k} on degree-k forms") {
  // p = 1 (Kronecker), k = 1: the operator converges to minus the identity
  auto m = kronecker_model();
  TangentialForm f(m, 1);
  f.add_term(mode_of(m, {1, 1}), IndexSet::single(0), Complex(0.5, 0.0));
  f.add_term(mode_of(m, {-1, -1}), IndexSet::single(0), Complex(0.5, 0.0));
  auto grid = GridForm::sample(f, 128);
  double prev_err = 2.0;
  for (double nu : {4.0, 8.0, 16.0, 32.0}) {
    auto out = smooth_form_rprime(grid, nu);
    double mult = measured_multiplier(grid, out, IndexSet::single(0));
    double err = std::abs(mult - signs::rprime(1, 1));
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(signs::rprime(1, 1) == -1);
  CHECK(prev_err < 5e-2);
}

TEST_CASE("mollifier convergence: sup error decreases on random band-limited forms") {
  std::mt19937_64 rng(11);
  auto m = one_leaf_t2();
  for (int trial = 0; trial < 10; ++trial) {
    int degree = static_cast<int>(rng() % 3);
    auto f = random_real_form(m, degree, 4, 2, rng);
    if (f.is_zero()) continue;
    auto grid = GridForm::sample(f, 128);
    double sign = signs::rprime(2, degree);
    double prev = 1e100;
    for (double nu : {4.0, 8.0, 16.0, 32.0}) {
      auto out = smooth_form_rprime(grid, nu);
      double err = (out * sign - grid).max_abs();
      CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("smoothing is linear") {
  std::mt19937_64 rng(13);
  auto m = one_leaf_t2();
  auto f = random_real_form(m, 1, 4, 2, rng);
  auto g = random_real_form(m, 1, 4, 2, rng);
  auto gf = GridForm::sample(f, 128);
  auto gg = GridForm::sample(g, 128);
  auto combo = gf * 0.7 + gg * (-1.3);
  auto lhs = smooth_form_rprime(combo, 8.0);
  auto rhs = smooth_form_rprime(gf, 8.0) * 0.7 + smooth_form_rprime(gg, 8.0) * (-1.3);
  CHECK((lhs - rhs).max_abs() < 1e-8);
}

TEST_CASE("regularized subtorus current: pairing against the exact line integral") {
  auto m = one_leaf_t2();
  LinearSubtorus circle(m, Eigen::Vector2d(0.0, 0.2), {ivec({1, 0})});
  GridCurrent s{SubtorusCurrent{circle}};

  // test form whose dx1 component varies across the circle, so the kernel
  // smearing contributes a genuine bias the pairing bound has to absorb
  TangentialForm omega(m, 1);
  omega.add_term(mode_of(m, {0, 0}), IndexSet::single(0), Complex(0.7, 0.0));
  omega = omega + wedge(TangentialForm::cosine_mode(m, mode_of(m, {1, 0})),
                        TangentialForm::frame_form(m, IndexSet::single(0))) *
                      0.3;
  omega = omega + wedge(TangentialForm::cosine_mode(m, mode_of(m, {0, 1})),
                        TangentialForm::frame_form(m, IndexSet::single(0))) *
                      0.25;
  omega = omega + wedge(TangentialForm::cosine_mode(m, mode_of(m, {0, 1})),
                        TangentialForm::frame_form(m, IndexSet::single(1))) *
                      0.4;
  REQUIRE(omega.real_flagged());

  double exact = circle.pair(omega);
  double expected = 0.7 + 0.25 * std::cos(2.0 * std::numbers::pi * 0.2);
  CHECK(std::abs(exact - expected) < 1e-14);

  auto rnu = regularize_current(s, 16.0, 256);
  // int_M R_nu S ^ omega vol_Q  via the full-torus current of the constant 1
  GridCurrent full{FormCurrent{TangentialForm::constant(m, Complex(1.0, 0.0))}};
  double paired = pair_current(full, rnu, omega, 256);
  double sign = signs::parity(m->leaf_dim() * circle.leaf_dim());
  CHECK(std::abs(paired - sign * exact) < 1e-2);

  // support stays within the kernel radius plus one grid cell
  double radius = (2.0 / 3.0) / 16.0 + 1.0 / 256.0;
  const auto& comp = rnu.component(IndexSet::single(1));
  for (std::size_t i = 0; i < comp.size(); ++i) {
    if (comp[i] == 0.0) continue;
    double x2 = static_cast<double>(i / 256) / 256.0;
    double dist = std::min(std::abs(x2 - 0.2), 1.0 - std::abs(x2 - 0.2));
    CHECK(dist <= radius);
  }
}

TEST_CASE("regularized full-torus current is the constant 1") {
  auto m = one_leaf_t2();
  LinearSubtorus whole(m, Eigen::Vector2d(0, 0), {ivec({1, 0}), ivec({0, 1})});
  GridCurrent s{SubtorusCurrent{whole}};
  auto rnu = regularize_current(s, 8.0, 64);
  CHECK(rnu.degree() == 0);
  for (double v : rnu.component(IndexSet::empty())) CHECK(v == 1.0);
}

TEST_CASE("intersection product: crossing circles against the closed form") {
  auto m = one_leaf_t2();
  LinearSubtorus horizontal(m, Eigen::Vector2d(0, 0), {ivec({1, 0})});
  LinearSubtorus vertical(m, Eigen::Vector2d(0, 0), {ivec({0, 1})});
  GridCurrent s{SubtorusCurrent{horizontal}};
  GridCurrent t{SubtorusCurrent{vertical}};

  auto eta = window_bump(m);
  double closed = intersection_closed_form(s, t, eta);
  CHECK(std::abs(closed - 1.0) < 1e-12);  // sign +1, h = 1, eta(0,0) = 1

  auto seq = intersection_product_numeric(s, t, eta, {4.0, 8.0, 16.0, 32.0}, 256, 2048);
  CHECK(seq.converged);
  double tol = std::max(1e-2, 3.0 * seq.error_estimate);
  CHECK(std::abs(seq.extrapolated - closed) < tol);
}

TEST_CASE("intersection product: disjoint parallel circles vanish") {
  auto m = one_leaf_t2();
  LinearSubtorus a(m, Eigen::Vector2d(0.0, 0.2), {ivec({1, 0})});
  LinearSubtorus b(m, Eigen::Vector2d(0.0, 0.7), {ivec({1, 0})});
  GridCurrent s{SubtorusCurrent{a}};
  GridCurrent t{SubtorusCurrent{b}};

  auto eta = window_bump(m);
  CHECK(intersection_closed_form(s, t, eta) == 0.0);
  auto seq = intersection_product_numeric(s, t, eta, {4.0, 8.0}, 128, 512);
  for (double v : seq.pairings) CHECK(v == 0.0);  // disjoint supports for nu >= 4
}

TEST_CASE("intersection product in T^3: straight and tilted configurations") {
  auto m = t3_line_model();
  LinearSubtorus t_plane(m, Eigen::Vector3d(0, 0, 0), {ivec({1, 0, 0}), ivec({0, 0, 1})});

  // test 1-form whose e1 component integrates to 0.8 over the e1 circle
  TangentialForm eta(m, 1);
  eta.add_term(mode_of(m, {0, 0, 0}), IndexSet::single(0), Complex(0.5, 0.0));
  eta = eta + wedge(TangentialForm::cosine_mode(m, mode_of(m, {1, 0, 0})),
                    TangentialForm::frame_form(m, IndexSet::single(0))) *
                  0.25;
  eta = eta + wedge(TangentialForm::cosine_mode(m, mode_of(m, {0, 1, 0})),
                    TangentialForm::frame_form(m, IndexSet::single(0))) *
                  0.3;

  SUBCASE("straight pair, h = 1") {
    LinearSubtorus s_plane(m, Eigen::Vector3d(0, 0, 0), {ivec({1, 0, 0}), ivec({0, 1, 0})});
    GridCurrent s{SubtorusCurrent{s_plane}};
    GridCurrent t{SubtorusCurrent{t_plane}};
    double closed = intersection_closed_form(s, t, eta);
    CHECK(std::abs(closed - 0.8) < 1e-12);
    auto seq = intersection_product_numeric(s, t, eta, {4.0, 8.0, 16.0}, 96, 256);
    double tol = std::max(1e-2, 3.0 * seq.error_estimate);
    CHECK(std::abs(seq.extrapolated - closed) < tol);
  }

  SUBCASE("tilted pair, h = sqrt(2)") {
    LinearSubtorus tilted(m, Eigen::Vector3d(0, 0, 0), {ivec({1, 0, 0}), ivec({0, 1, 1})});
    GridCurrent s{SubtorusCurrent{tilted}};
    GridCurrent t{SubtorusCurrent{t_plane}};
    double closed = intersection_closed_form(s, t, eta);
    CHECK(std::abs(closed - std::sqrt(2.0) * 0.8) < 1e-12);
    auto seq = intersection_product_numeric(s, t, eta, {4.0, 8.0, 16.0}, 96, 256);
    double tol = std::max(1e-2, 3.0 * seq.error_estimate);
    CHECK(std::abs(seq.extrapolated - closed) < tol);
  }
}

TEST_CASE("full-torus self-intersection reproduces the integration current") {
  auto m = one_leaf_t2();
  LinearSubtorus whole(m, Eigen::Vector2d(0, 0), {ivec({1, 0}), ivec({0, 1})});
  GridCurrent s{SubtorusCurrent{whole}};

  // degree-2 test form with unit mean
  auto eta = wedge(window_bump(m), TangentialForm::volume_form(m));
  double mean = whole.pair(eta);
  CHECK(mean > 0.0);

  double closed = intersection_closed_form(s, s, eta);
  CHECK(std::abs(closed - mean) < 1e-12);  // sign +1, h = 1, identity intersection

  auto seq = intersection_product_numeric(s, s, eta, {4.0, 8.0}, 128, 256);
  for (double v : seq.pairings) CHECK(std::abs(v - mean) < 1e-6);
}

TEST_CASE("form currents multiply to the wedge current") {
  std::mt19937_64 rng(17);
  auto m = one_leaf_t2();
  auto omega = random_real_form(m, 1, 3, 1, rng);
  auto tau = random_real_form(m, 1, 3, 1, rng);
  auto eta = window_bump(m);

  GridCurrent s{FormCurrent{omega}};
  GridCurrent t{FormCurrent{tau}};

  // closed form two ways: exact coefficient arithmetic vs grid quadrature
  double closed = intersection_closed_form(s, t, eta);
  auto integrand = wedge(wedge(omega, tau), eta);
  double quad = 0.0;
  const int g = 128;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      Eigen::VectorXd x(2);
      x << static_cast<double>(i) / g, static_cast<double>(j) / g;
      quad += integrand.evaluate_component(IndexSet::full(2), x).real();
    }
  quad /= static_cast<double>(g) * g;
  CHECK(std::abs(closed - quad) < 1e-6);

  auto seq = intersection_product_numeric(s, t, eta, {8.0, 16.0, 32.0}, 128, 128);
  double tol = std::max(1e-2, 3.0 * seq.error_estimate);
  CHECK(std::abs(seq.extrapolated - closed) < tol);
}

TEST_CASE("intersection pairing is linear in the test form") {
  auto m = one_leaf_t2();
  LinearSubtorus horizontal(m, Eigen::Vector2d(0, 0), {ivec({1, 0})});
  LinearSubtorus vertical(m, Eigen::Vector2d(0, 0), {ivec({0, 1})});
  GridCurrent s{SubtorusCurrent{horizontal}};
  GridCurrent t{SubtorusCurrent{vertical}};

  auto eta1 = window_bump(m);
  std::mt19937_64 rng(19);
  auto eta2 = random_real_form(m, 0, 4, 2, rng);

  auto rnu = regularize_current(t, 8.0, 128);
  double v1 = pair_current(s, rnu, eta1, 1024);
  double v2 = pair_current(s, rnu, eta2, 1024);
  auto combo = eta1 * 0.6 + eta2 * 2.0;
  double vc = pair_current(s, rnu, combo, 1024);
  CHECK(std::abs(vc - (0.6 * v1 + 2.0 * v2)) < 1e-8);
}
