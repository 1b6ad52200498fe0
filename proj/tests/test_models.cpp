#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "leafcalc/affine_map.hpp"
#include "leafcalc/subtorus.hpp"
#include "leafcalc/suspension.hpp"
#include "leafcalc/vector_field.hpp"

using namespace leafcalc;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

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

IntVector ivec3(std::int64_t a, std::int64_t b, std::int64_t c) {
  IntVector v(3);
  v << a, b, c;
  return v;
}

IntVector ivec2(std::int64_t a, std::int64_t b) {
  IntVector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("make_torus_model produces orthonormal frames") {
  auto kron = kronecker_model();
  const double norm = std::sqrt(1.0 + kGolden * kGolden);
  CHECK(kron->leaf_dim() == 1);
  CHECK(kron->transverse_dim() == 1);
  CHECK(std::abs(kron->tangential_vector(0)(0) - 1.0 / norm) < 1e-15);
  CHECK(std::abs(kron->tangential_vector(0)(1) - kGolden / norm) < 1e-15);

  auto one_leaf = FoliatedTorusModel::one_leaf(2);
  CHECK(one_leaf->leaf_dim() == 2);
  CHECK(one_leaf->transverse_dim() == 0);

  auto t3 = t3_line_model();
  CHECK(t3->leaf_dim() == 1);
  CHECK(t3->transverse_dim() == 2);
  CHECK((t3->transverse_vector(0) - Eigen::Vector3d(0, 1, 0)).norm() == 0.0);
  CHECK((t3->transverse_vector(1) - Eigen::Vector3d(0, 0, 1)).norm() == 0.0);

  for (ModelPtr m : {kron, one_leaf, t3}) {
    Eigen::MatrixXd frame(m->ambient_dim(), m->ambient_dim());
    frame.leftCols(m->leaf_dim()) = m->tangential_frame();
    frame.rightCols(m->transverse_dim()) = m->transverse_frame();
    Eigen::MatrixXd gram = frame.transpose() * frame;
    CHECK((gram - Eigen::MatrixXd::Identity(m->ambient_dim(), m->ambient_dim()))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }

  Eigen::VectorXd dep(2);
  dep << 2.0, 2.0 * kGolden;
  Eigen::VectorXd d0(2);
  d0 << 1.0, kGolden;
  CHECK_THROWS_AS(FoliatedTorusModel::from_directions(2, {d0, dep}), std::invalid_argument);
}

TEST_CASE("model JSON round trip") {
  auto m = kronecker_model();
  auto j = m->to_json();
  auto m2 = FoliatedTorusModel::from_json(j);
  CHECK(m->same_geometry(*m2));
}

TEST_CASE("check_foliated_map on the bundled examples") {
  auto one_leaf = FoliatedTorusModel::one_leaf(2);
  IntMatrix cat(2, 2);
  cat << 2, 1, 1, 1;
  CHECK(check_foliated_map(AffineFoliatedMap::linear(one_leaf, cat)).foliated);

  auto kron = kronecker_model();
  IntMatrix shear(2, 2);
  shear << 1, 1, 0, 1;
  auto check = check_foliated_map(AffineFoliatedMap::linear(kron, shear));
  CHECK_FALSE(check.foliated);
  CHECK(check.residual > 1e-6);

  Eigen::VectorXd c(2);
  c << 0.3, 0.9;
  CHECK(check_foliated_map(AffineFoliatedMap::translation(kron, c)).foliated);
}

TEST_CASE("transversality: crossing circles in the one-leaf torus") {
  auto m = FoliatedTorusModel::one_leaf(2);
  LinearSubtorus horizontal(m, Eigen::Vector2d(0, 0), {ivec2(1, 0)});
  LinearSubtorus vertical(m, Eigen::Vector2d(0, 0), {ivec2(0, 1)});

  auto r = check_transversal_submanifolds(horizontal, vertical);
  CHECK(r.transversal);
  CHECK(r.nonempty);
  CHECK(r.component_count == 1);
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0].dim() == 0);
  CHECK(r.components[0].basepoint().cwiseAbs().maxCoeff() < 1e-12);

  // symmetric in its arguments
  auto r2 = check_transversal_submanifolds(vertical, horizontal);
  CHECK(r2.transversal == r.transversal);
  CHECK(r2.component_count == r.component_count);

  // a circle is never transversal to itself
  auto self = check_transversal_submanifolds(horizontal, horizontal);
  CHECK_FALSE(self.transversal);
}

TEST_CASE("transversality: disjoint parallel circles are detected as empty") {
  auto m = FoliatedTorusModel::one_leaf(2);
  LinearSubtorus a(m, Eigen::Vector2d(0.0, 0.2), {ivec2(1, 0)});
  LinearSubtorus b(m, Eigen::Vector2d(0.0, 0.7), {ivec2(1, 0)});
  // parallel circles: not transversal at all (spans do not add up)
  auto r = check_transversal_submanifolds(a, b);
  CHECK_FALSE(r.transversal);
}

TEST_CASE("transversality: T^3 line foliation, planes through the leaf axis") {
  auto m = t3_line_model();
  LinearSubtorus s(m, Eigen::Vector3d(0, 0, 0), {ivec3(1, 0, 0), ivec3(0, 1, 0)});
  LinearSubtorus t(m, Eigen::Vector3d(0, 0, 0), {ivec3(1, 0, 0), ivec3(0, 0, 1)});
  CHECK(s.leaf_dim() == 1);
  CHECK(s.transverse_dim() == 1);

  auto r = check_transversal_submanifolds(s, t);
  CHECK(r.transversal);
  CHECK(r.nonempty);
  CHECK(r.component_count == 1);
  REQUIRE(r.components.size() == 1);
  // intersection is the e1 circle: leaf dimension k+l-p = 1+1-1 = 1
  CHECK(r.components[0].dim() == 1);
  CHECK(r.components[0].leaf_dim() == 1);

  // intersection count with multiple components: two lines of slope 0 and 2
  auto m2 = FoliatedTorusModel::one_leaf(2);
  LinearSubtorus flat(m2, Eigen::Vector2d(0, 0), {ivec2(1, 0)});
  LinearSubtorus steep(m2, Eigen::Vector2d(0, 0), {ivec2(1, 2)});
  auto r2 = check_transversal_submanifolds(flat, steep);
  CHECK(r2.transversal);
  CHECK(r2.component_count == 2);
}

TEST_CASE("subtorus pairing: exact Fourier route equals quadrature") {
  auto m = FoliatedTorusModel::one_leaf(2);
  LinearSubtorus circle(m, Eigen::Vector2d(0.0, 0.25), {ivec2(1, 0)});
  std::mt19937_64 rng(7);
  auto omega = random_real_form(m, 1, 6, 3, rng);

  double exact = circle.pair(omega);
  double quad = circle.pair_quadrature(
      [&](const Eigen::VectorXd& x) {
        double acc = 0.0;
        auto vals = omega.evaluate(x);
        for (const auto& [I, v] : vals) acc += v.real() * circle.frame_minor(I);
        return acc;
      },
      512);
  CHECK(std::abs(exact - quad) < 1e-10);
}

TEST_CASE("h factor: orthogonal pairs give 1, tilted pair gives sqrt(2)") {
  auto m2 = FoliatedTorusModel::one_leaf(2);
  LinearSubtorus h2(m2, Eigen::Vector2d(0, 0), {ivec2(1, 0)});
  LinearSubtorus v2(m2, Eigen::Vector2d(0, 0), {ivec2(0, 1)});
  CHECK(h_factor(h2, v2) == 1.0);  // q = 0, all transversal volumes are counting measures

  auto m3 = t3_line_model();
  LinearSubtorus s(m3, Eigen::Vector3d(0, 0, 0), {ivec3(1, 0, 0), ivec3(0, 1, 0)});
  LinearSubtorus t(m3, Eigen::Vector3d(0, 0, 0), {ivec3(1, 0, 0), ivec3(0, 0, 1)});
  CHECK(std::abs(h_factor(s, t) - 1.0) < 1e-14);

  LinearSubtorus tilted(m3, Eigen::Vector3d(0, 0, 0), {ivec3(1, 0, 0), ivec3(0, 1, 1)});
  double h = h_factor(tilted, t);
  CHECK(std::abs(h - std::sqrt(2.0)) < 1e-12);
  // invariant under swapping the arguments
  CHECK(std::abs(h_factor(t, tilted) - h) < 1e-12);
}

TEST_CASE("h factor: kernel-overlap quadrature oracle on the tilted pair") {
  // h equals the integral over T^3 of the product of unit-mass smeared
  // deltas of S and T, divided by the measure of S cap T (here 1). The
  // smearing profiles integrate to 1 across each normal direction.
  auto m3 = t3_line_model();
  LinearSubtorus tilted(m3, Eigen::Vector3d(0, 0, 0), {ivec3(1, 0, 0), ivec3(0, 1, 1)});
  LinearSubtorus t(m3, Eigen::Vector3d(0, 0, 0), {ivec3(1, 0, 0), ivec3(0, 0, 1)});

  auto bump = [](double s) {  // unit-mass C^infty bump of half-width 0.25 on R
    double w = 0.25;
    double u = s / w;
    if (std::abs(u) >= 1.0) return 0.0;
    double v = std::exp(-1.0 / (1.0 - u * u));
    return v / (0.443993816168079437 * w);  // int_{-1}^{1} e^{-1/(1-u^2)} du
  };

  Eigen::VectorXd n_s = tilted.normal_transverse_frame().col(0);
  Eigen::VectorXd n_t = t.normal_transverse_frame().col(0);

  const int g = 512;
  double acc = 0.0;
  for (int i2 = 0; i2 < g; ++i2)
    for (int i3 = 0; i3 < g; ++i3) {
      Eigen::VectorXd x(3);
      x << 0.0, (i2 + 0.5) / g, (i3 + 0.5) / g;
      double ds = 1e9, dt = 1e9;
      for (int z2 = -1; z2 <= 1; ++z2)
        for (int z3 = -1; z3 <= 1; ++z3) {
          Eigen::VectorXd xs = x;
          xs(1) += z2;
          xs(2) += z3;
          ds = std::min(ds, std::abs(n_s.dot(xs)));
          dt = std::min(dt, std::abs(n_t.dot(xs)));
        }
      acc += bump(ds) * bump(dt);
    }
  acc /= static_cast<double>(g) * g;
  CHECK(std::abs(acc - h_factor(tilted, t)) < 1e-7);
}

TEST_CASE("covariant derivative: flat cases and finite differences") {
  auto m = FoliatedTorusModel::one_leaf(2);

  auto x_const = FoliatedVectorField::constant(m, Eigen::Vector2d(1.0, -2.0));
  auto y_const = FoliatedVectorField::constant(m, Eigen::Vector2d(0.5, 0.25));
  auto nabla = covariant_derivative(x_const, y_const);
  for (int i = 0; i < 2; ++i) CHECK(nabla.component(i).max_coefficient_magnitude() < 1e-14);

  // X = d_1, Y = (sin 2 pi x_2, 0): no x_1 dependence, derivative vanishes
  LatticeMode m2(2);
  m2[1] = 1;
  std::vector<TangentialForm> comps{TangentialForm::sine_mode(m, m2),
                                    TangentialForm::zero(m, 0)};
  FoliatedVectorField y_field(m, comps);
  auto x_e1 = FoliatedVectorField::constant(m, Eigen::Vector2d(1.0, 0.0));
  auto nabla2 = covariant_derivative(x_e1, y_field);
  for (int i = 0; i < 2; ++i) CHECK(nabla2.component(i).max_coefficient_magnitude() < 1e-13);
}

TEST_CASE("covariant derivative equals the directional derivative on flat models") {
  std::mt19937_64 rng(13);
  for (ModelPtr m : {FoliatedTorusModel::one_leaf(2), t3_line_model()}) {
    const int n = m->ambient_dim();
    // random trigonometric X; Y foliated (leafwise part arbitrary, transverse
    // part constant)
    std::vector<TangentialForm> xc, yc;
    for (int i = 0; i < n; ++i) {
      xc.push_back(random_real_form(m, 0, 3, 1, rng));
      yc.push_back(random_real_form(m, 0, 3, 1, rng));
    }
    FoliatedVectorField x(m, xc);
    FoliatedVectorField y_raw(m, yc);
    auto y = y_raw.project_leafwise() +
             FoliatedVectorField::constant(m, Eigen::VectorXd::Constant(n, 0.3))
                 .project_transverse();
    REQUIRE(y.foliated());

    auto nabla = covariant_derivative(x, y);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-6;
    double worst = 0.0;
    for (int s = 0; s < 64; ++s) {
      Eigen::VectorXd pt(n);
      for (int i = 0; i < n; ++i) pt(i) = u(rng);
      Eigen::VectorXd xv = x.evaluate(pt);
      Eigen::VectorXd fd = (y.evaluate(pt + h * xv) - y.evaluate(pt - h * xv)) / (2.0 * h);
      Eigen::VectorXd got = nabla.evaluate(pt);
      worst = std::max(worst, (fd - got).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("covariant derivative is tensorial in X and additive in Y") {
  std::mt19937_64 rng(19);
  auto m = FoliatedTorusModel::one_leaf(2);
  std::vector<TangentialForm> xc, yc1, yc2;
  for (int i = 0; i < 2; ++i) {
    xc.push_back(random_real_form(m, 0, 3, 1, rng));
    yc1.push_back(random_real_form(m, 0, 3, 1, rng));
    yc2.push_back(random_real_form(m, 0, 3, 1, rng));
  }
  FoliatedVectorField x(m, xc), y1(m, yc1), y2(m, yc2);
  auto f = random_real_form(m, 0, 3, 1, rng);

  auto lhs = covariant_derivative(x.scaled_by(f), y1);
  auto rhs_field = covariant_derivative(x, y1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 32; ++s) {
    Eigen::VectorXd pt(2);
    pt << u(rng), u(rng);
    double fv = f.evaluate_component(IndexSet::empty(), pt).real();
    worst = std::max(worst,
                     (lhs.evaluate(pt) - fv * rhs_field.evaluate(pt)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-8);

  auto add_lhs = covariant_derivative(x, y1 + y2);
  auto add_rhs = covariant_derivative(x, y1) + covariant_derivative(x, y2);
  for (int i = 0; i < 2; ++i)
    CHECK((add_lhs.component(i) - add_rhs.component(i)).max_coefficient_magnitude() < 1e-10);
}

TEST_CASE("covariant derivative rejects a non-foliated Y") {
  auto m = t3_line_model();
  // transverse component depending on the leaf coordinate x1
  LatticeMode m1(3);
  m1[0] = 1;
  std::vector<TangentialForm> comps{TangentialForm::zero(m, 0),
                                    TangentialForm::sine_mode(m, m1),
                                    TangentialForm::zero(m, 0)};
  FoliatedVectorField bad(m, comps);
  CHECK_FALSE(bad.foliated());
  CHECK(bad.foliated_residual() > 0.1);
  auto x = FoliatedVectorField::constant(m, Eigen::Vector3d(1, 0, 0));
  CHECK_THROWS_AS(covariant_derivative(x, bad), std::invalid_argument);
}

TEST_CASE("exponential map and parallel transport on flat data") {
  auto m = FoliatedTorusModel::one_leaf(2);
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd xi = 0.25 * m->tangential_vector(0);
  Eigen::VectorXd reached = exp_map(*m, origin, xi);
  CHECK((reached - xi).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(m->injectivity_radius() == 0.5);

  std::vector<Eigen::VectorXd> path{origin, reached};
  Eigen::MatrixXd transport = parallel_transport(*m, path);
  CHECK((transport - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  // transported inner products are constant along the path
  Eigen::VectorXd b1(2), b2(2);
  b1 << 0.3, -0.4;
  b2 << 1.0, 0.2;
  double before = b1.dot(b2);
  double after = (transport * b1).dot(transport * b2);
  CHECK(std::abs(before - after) < 1e-12);
}

TEST_CASE("suspension model: hyperbolicity and monodromy powers") {
  IntMatrix cat(2, 2);
  cat << 2, 1, 1, 1;
  SuspensionModel sus(cat);
  CHECK(sus.hyperbolic());
  CHECK(sus.fiber_dim() == 2);
  CHECK(sus.leaf_dim() == 2);
  CHECK(sus.transverse_dim() == 1);

  IntMatrix a3 = sus.monodromy_power(3);
  CHECK(a3.trace() == 18);

  IntMatrix rot(2, 2);
  rot << 0, -1, 1, 0;
  SuspensionModel elliptic(rot);
  CHECK_FALSE(elliptic.hyperbolic());

  IntMatrix bad(2, 2);
  bad << 2, 0, 0, 1;
  CHECK_THROWS_AS(SuspensionModel{bad}, std::invalid_argument);

  auto j = sus.to_json();
  auto sus2 = SuspensionModel::from_json(j);
  CHECK(sus2.monodromy() == cat);
}

TEST_CASE("subtorus rejects non-primitive directions") {
  auto m = FoliatedTorusModel::one_leaf(2);
  CHECK_THROWS_AS(LinearSubtorus(m, Eigen::Vector2d(0, 0), {ivec2(2, 0)}),
                  std::invalid_argument);
}
