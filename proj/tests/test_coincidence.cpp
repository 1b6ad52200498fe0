#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "leafcalc/lefschetz.hpp"

using namespace leafcalc;

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

IntMatrix cat_matrix() {
  IntMatrix a(2, 2);
  a << 2, 1, 1, 1;
  return a;
}

ModelPtr kronecker_model() {
  Eigen::VectorXd d(2);
  d << 1.0, kGolden;
  return FoliatedTorusModel::from_directions(2, {d});
}

Flow morse_flow() {
  return Flow::vector_field(FoliatedVectorField::morse(FoliatedTorusModel::one_leaf(2)));
}

// aggregated atom weight at integer time nu is det(id - A^nu) = 2 - tr(A^nu),
// with the trace recursion t_{nu+1} = 3 t_nu - t_{nu-1}, t_0 = 2, t_1 = 3
std::int64_t cat_atom_oracle(int nu) {
  std::int64_t prev = 2, cur = 3;
  for (int i = 1; i < nu; ++i) {
    std::int64_t next = 3 * cur - prev;
    prev = cur;
    cur = next;
  }
  return 2 - (nu == 0 ? prev : cur);
}

}  // namespace

TEST_CASE("fixed point contributions of the Morse flow") {
  auto flow = morse_flow();
  auto grid = DistributionOnRPlus::uniform_grid(2.0, 64);
  auto records = fixed_points(flow, 1.0);
  REQUIRE(records.size() == 4);

  int sign_sum = 0;
  for (const auto& rec : records) {
    auto fp = fixed_point_contribution(flow, rec, grid);
    // q = 0: the density is the constant sign
    for (double v : fp.density) CHECK(v == static_cast<double>(fp.contribution.sign));
    sign_sum += fp.contribution.sign;

    // source at the origin has sign +1: det(id - diag(e^t, e^t)) > 0
    if (rec.location.cwiseAbs().maxCoeff() < 1e-9) CHECK(fp.contribution.sign == 1);
  }
  CHECK(sign_sum == 0);
}

TEST_CASE("scalar cocycle scales fixed-point densities") {
  auto m = FoliatedTorusModel::one_leaf(2);
  auto flow = Flow::vector_field(FoliatedVectorField::morse(m), {}, 0.4);
  auto grid = DistributionOnRPlus::uniform_grid(1.0, 16);
  auto records = fixed_points(flow, 1.0);
  auto fp = fixed_point_contribution(flow, records.front(), grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(fp.density[i] -
                   fp.contribution.sign * std::exp(0.4 * grid[i])) < 1e-12);
}

TEST_CASE("orbit contributions of the cat-map suspension") {
  SuspensionModel sus(cat_matrix());
  ScalarCocycle trivial{0.0};
  auto records = periodic_orbits_suspension(sus, 2);

  for (const auto& rec : records) {
    auto c = orbit_contribution(sus, rec, trivial);
    if (rec.least_period == 1 && rec.multiplicity == 1) {
      CHECK(c.atom_time == 1.0);
      CHECK(c.atom_weight == -1.0);  // det(id - A) = -1
    }
    if (rec.least_period == 2) {
      CHECK(c.atom_time == 2.0);
      CHECK(c.atom_weight == -2.0);  // 2 * sgn det(id - A^2) = 2 * sgn(-5)
    }
  }

  // cocycle multiplies the weight by e^{lambda t0}
  ScalarCocycle rho{0.3};
  for (const auto& rec : records) {
    auto c0 = orbit_contribution(sus, rec, trivial);
    auto c1 = orbit_contribution(sus, rec, rho);
    CHECK(std::abs(c1.atom_weight - c0.atom_weight * std::exp(0.3 * c0.atom_time)) < 1e-12);
  }
}

TEST_CASE("assembled distribution: cat suspension atoms match the recursion oracle") {
  auto flow = Flow::suspension(SuspensionModel(cat_matrix()));
  auto lef = assemble_lefschetz_distribution(flow, 8.0, 128);

  REQUIRE(lef.distribution.atoms().size() == 8);
  const double expected[] = {-1.0, -5.0, -16.0, -45.0, -121.0};
  for (int nu = 1; nu <= 8; ++nu) {
    const auto& atom = lef.distribution.atoms()[static_cast<std::size_t>(nu - 1)];
    CHECK(atom.t == static_cast<double>(nu));
    if (nu <= 5) CHECK(atom.weight == expected[nu - 1]);
    // integer arithmetic end to end, through nu = 8
    CHECK(atom.weight == static_cast<double>(cat_atom_oracle(nu)));
  }
  for (double v : lef.distribution.density()) CHECK(v == 0.0);

  // the weight sequence obeys the characteristic-polynomial recursion
  // w_{nu+1} = 3 w_nu - w_{nu-1} - 2 (from det(id - A^nu) = 2 - tr A^nu)
  auto w = [&](int nu) { return lef.distribution.atoms()[static_cast<std::size_t>(nu - 1)].weight; };
  for (int nu = 2; nu <= 7; ++nu)
    CHECK(w(nu + 1) == 3.0 * w(nu) - w(nu - 1) - 2.0);
}

TEST_CASE("assembled distribution: Morse flow has zero smooth part, no atoms") {
  auto lef = assemble_lefschetz_distribution(morse_flow(), 2.0, 128);
  CHECK(lef.distribution.atoms().empty());
  for (double v : lef.distribution.density()) CHECK(v == 0.0);
  CHECK(lef.contributions.size() == 4);
}

TEST_CASE("assembled distribution: irrational translation flow is empty") {
  auto m = kronecker_model();
  Eigen::VectorXd v = m->tangential_vector(0);
  auto flow = Flow::affine(m, v);
  auto lef = assemble_lefschetz_distribution(flow, 2.0, 64);
  CHECK(lef.distribution.atoms().empty());
  for (double x : lef.distribution.density()) CHECK(x == 0.0);

  // rational direction violates graph transversality
  Eigen::VectorXd rational(2);
  rational << 1.0, 0.0;
  auto bad = Flow::affine(FoliatedTorusModel::one_leaf(2), rational);
  CHECK_THROWS_AS(assemble_lefschetz_distribution(bad, 2.0, 64), HypothesisViolation);
}

TEST_CASE("Lefschetz number function: translation flows") {
  SpectralTruncation trunc{50, 1e-9};

  auto kron = kronecker_model();
  auto kron_basis = harmonic_basis(kron, trunc);
  auto flow = Flow::affine(kron, kron->tangential_vector(0));
  auto grid = DistributionOnRPlus::uniform_grid(2.0, 64);
  auto traces = lefschetz_number_function(flow, kron_basis, grid);
  for (double v : traces) CHECK(std::abs(v) < 1e-12);  // 1 - 1

  auto t4_a = harmonic_basis(FoliatedTorusModel::one_leaf(2), trunc);
  auto t4 = kunneth_basis(t4_a, t4_a);
  Eigen::VectorXd v4(4);
  v4 << 0.3, 0.1, 0.7, 0.2;
  auto flow4 = Flow::affine(t4.model, v4);
  auto traces4 = lefschetz_number_function(flow4, t4, grid);
  for (double v : traces4) CHECK(std::abs(v) < 1e-12);  // 1 - 4 + 6 - 4 + 1
}

TEST_CASE("Lefschetz number function: Morse flow by quadrature") {
  auto flow = morse_flow();
  auto basis = harmonic_basis(flow.torus_model(), SpectralTruncation{10, 1e-9});
  auto grid = DistributionOnRPlus::uniform_grid(1.0, 16);
  auto traces = lefschetz_number_function(flow, basis, grid, 48);
  for (double v : traces) CHECK(std::abs(v) < 1e-7);  // chi(T^2) = 0
}

TEST_CASE("verify_dynamical_lefschetz: full mode on the Morse flow") {
  auto flow = morse_flow();
  auto basis = harmonic_basis(flow.torus_model(), SpectralTruncation{10, 1e-9});
  auto rep = verify_dynamical_lefschetz(flow, &basis, 2.0, 128);
  CHECK(rep.mode == VerificationReport::Mode::kFull);
  CHECK(rep.pass);
  CHECK(rep.max_smooth_deviation < 1e-6);
  CHECK(rep.max_atom_weight < 1e-9);
}

TEST_CASE("verify_dynamical_lefschetz: full mode on the Kronecker translation") {
  auto kron = kronecker_model();
  auto basis = harmonic_basis(kron, SpectralTruncation{50, 1e-9});
  auto flow = Flow::affine(kron, kron->tangential_vector(0));
  auto rep = verify_dynamical_lefschetz(flow, &basis, 2.0, 512);
  CHECK(rep.mode == VerificationReport::Mode::kFull);
  CHECK(rep.pass);
  CHECK(rep.max_smooth_deviation < 1e-10);
}

TEST_CASE("verify_dynamical_lefschetz: partial mode on the suspension") {
  auto flow = Flow::suspension(SuspensionModel(cat_matrix()));
  auto rep = verify_dynamical_lefschetz(flow, nullptr, 5.0, 128);
  CHECK(rep.mode == VerificationReport::Mode::kPartialLocal);
  CHECK(rep.local_oracle_pass);
  CHECK(rep.pass);
  REQUIRE(rep.atoms.size() == 5);
  REQUIRE(rep.oracle_atom_weights.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(rep.atoms[i].weight == rep.oracle_atom_weights[i]);
}

TEST_CASE("classical Lefschetz formula for the cat map and its square") {
  auto basis = harmonic_basis(FoliatedTorusModel::one_leaf(2), SpectralTruncation{10, 1e-9});
  auto model = basis.model;

  auto f = AffineFoliatedMap::linear(model, cat_matrix());
  auto rep = classical_lefschetz_check(f, basis);
  CHECK(rep.fixed_point_count == 1);
  CHECK(rep.left == -1.0);
  CHECK(rep.right == -1.0);
  CHECK(rep.pass);

  auto f2 = compose(f, f);
  auto rep2 = classical_lefschetz_check(f2, basis);
  CHECK(rep2.fixed_point_count == 5);
  CHECK(rep2.left == -5.0);
  CHECK(rep2.right == -5.0);  // 1 - 7 + 1
  CHECK(rep2.pass);

  auto id = AffineFoliatedMap::identity(model);
  CHECK_THROWS_AS(classical_lefschetz_check(id, basis), std::invalid_argument);
}

TEST_CASE("classical Lefschetz: brute-force fixed point oracle for A^2") {
  // independent enumeration: scan integer offsets z and keep solutions of
  // (id - A^2) x = z inside the fundamental domain
  IntMatrix a2 = cat_matrix() * cat_matrix();
  IntMatrix m = IntMatrix::Identity(2, 2) - a2;
  Eigen::Matrix2d md = m.cast<double>();
  int count = 0;
  for (int z1 = -20; z1 <= 20; ++z1)
    for (int z2 = -20; z2 <= 20; ++z2) {
      Eigen::Vector2d x = md.inverse() * Eigen::Vector2d(z1, z2);
      if (x(0) >= -1e-12 && x(0) < 1.0 - 1e-12 && x(1) >= -1e-12 && x(1) < 1.0 - 1e-12)
        ++count;
    }
  CHECK(count == 5);
}

TEST_CASE("pair_distribution: atoms, zero distribution, quadrature oracle") {
  auto grid = DistributionOnRPlus::uniform_grid(4.0, 256);
  DistributionOnRPlus d = DistributionOnRPlus::zero(grid);
  d.add_atom(2.0, 1.5);

  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid[i];
    g[i] = (t > 1.0 && t < 3.0) ? std::pow(std::sin(M_PI * (t - 1.0) / 2.0), 2) : 0.0;
  }
  // g(2) = 1 exactly
  CHECK(std::abs(pair_distribution(d, g) - 1.5) < 1e-12);

  auto zero = DistributionOnRPlus::zero(grid);
  CHECK(pair_distribution(zero, g) == 0.0);

  // smooth-only distribution against a high-resolution quadrature oracle
  std::vector<double> density(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) density[i] = std::cos(grid[i]);
  DistributionOnRPlus smooth(grid, density);
  double got = pair_distribution(smooth, g);

  double oracle = 0.0;
  const int fine = 200000;
  for (int i = 0; i < fine; ++i) {
    double t = 1.0 + 2.0 * (i + 0.5) / fine;
    oracle += std::cos(t) * std::pow(std::sin(M_PI * (t - 1.0) / 2.0), 2);
  }
  oracle *= 2.0 / fine;
  CHECK(std::abs(got - oracle) < 1e-6);

  // linearity in both slots
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> g2(grid.size(), 0.0);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) g2[i] = u(rng);
  double a = 0.7, b = -1.3;
  std::vector<double> combo(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) combo[i] = a * g[i] + b * g2[i];
  CHECK(std::abs(pair_distribution(smooth, combo) -
                 (a * pair_distribution(smooth, g) + b * pair_distribution(smooth, g2))) <
        1e-10);

  std::vector<double> bad(grid.size(), 1.0);
  CHECK_THROWS_AS(pair_distribution(smooth, bad), std::invalid_argument);
}

TEST_CASE("distribution JSON and CSV round trips") {
  auto grid = DistributionOnRPlus::uniform_grid(2.0, 8);
  DistributionOnRPlus d = DistributionOnRPlus::zero(grid);
  d.add_atom(1.0, -1.0);
  d.add_atom(2.0, -5.0);
  auto j = d.to_json();
  auto d2 = DistributionOnRPlus::from_json(j);
  CHECK(d2.atoms().size() == 2);
  CHECK(d2.atoms()[0].weight == -1.0);
  CHECK(d2.grid() == d.grid());

  auto csv = d.atoms_csv();
  CHECK(csv.substr(0, 9) == "t,weight\n");
  CHECK(DistributionOnRPlus::zero(grid).atoms_csv() == "t,weight\n");
}

TEST_CASE("atom aggregation merges coincident times") {
  auto grid = DistributionOnRPlus::uniform_grid(3.0, 8);
  DistributionOnRPlus d = DistributionOnRPlus::zero(grid);
  d.add_atom(1.0, 2.0);
  d.add_atom(1.0 + 5e-10, -2.0);
  d.add_atom(2.0, 3.0);
  d.aggregate_atoms(1e-9);
  REQUIRE(d.atoms().size() == 2);
  CHECK(d.atoms()[0].weight == 0.0);
  CHECK(d.atoms()[1].weight == 3.0);
}

TEST_CASE("dual-route trace check: translation flows and the constant cat family") {
  SpectralTruncation trunc{50, 1e-9};
  auto kron = kronecker_model();
  auto basis = harmonic_basis(kron, trunc);
  auto flow = Flow::affine(kron, kron->tangential_vector(0));
  auto grid = DistributionOnRPlus::uniform_grid(2.0, 32);

  auto rep = dual_trace_check(flow, basis, grid);
  CHECK(rep.pass);
  for (double v : rep.via_duality) CHECK(std::abs(v) < 1e-12);

  // one-leaf flow family (translation): both routes equal chi = 0
  auto t2 = harmonic_basis(FoliatedTorusModel::one_leaf(2), trunc);
  Eigen::VectorXd v2(2);
  v2 << 0.4, 0.9;
  auto rep2 = dual_trace_check(Flow::affine(t2.model, v2), t2, grid);
  CHECK(rep2.pass);
  for (double v : rep2.via_duality) CHECK(std::abs(v) < 1e-12);

  // constant family: the single-map alternating trace, here det(id - A) = -1
  auto cat = AffineFoliatedMap::linear(t2.model, cat_matrix());
  auto rep3 = dual_trace_check(cat, t2, grid);
  CHECK(rep3.pass);
  for (double v : rep3.via_duality) CHECK(std::abs(v + 1.0) < 1e-12);
}

TEST_CASE("Lefschetz function is invariant under Gram re-orthonormalization") {
  // scaling the representatives changes the Gram matrix but not the traces
  SpectralTruncation trunc{30, 1e-9};
  auto basis = harmonic_basis(FoliatedTorusModel::one_leaf(2), trunc);
  auto scaled = basis;
  for (auto& level : scaled.levels) {
    for (std::size_t i = 0; i < level.reps.size(); ++i)
      level.reps[i] = level.reps[i] * (1.0 + 0.5 * static_cast<double>(i));
    const int dim = static_cast<int>(level.reps.size());
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        level.gram(i, j) = l2_inner(level.reps[static_cast<std::size_t>(i)],
                                    level.reps[static_cast<std::size_t>(j)]);
  }
  auto cat = AffineFoliatedMap::linear(basis.model, cat_matrix());
  CHECK(std::abs(alternating_trace(cat, basis) - alternating_trace(cat, scaled)) < 1e-10);
}
