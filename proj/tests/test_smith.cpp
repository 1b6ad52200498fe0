#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "leafcalc/smith.hpp"

using namespace leafcalc;

namespace {

// Independent oracle: enumerate solutions of C x === 0 (mod Z^r) on the torus
// by scanning integer right-hand sides z in the image box and inverting.
std::set<std::vector<long long>> brute_force_torus_solutions(const IntMatrix& c, int denom_scale) {
  const int n = static_cast<int>(c.cols());
  Eigen::MatrixXd cd = c.cast<double>();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cd);
  REQUIRE(lu.isInvertible());

  Eigen::VectorXd row_sums = cd.cwiseAbs().rowwise().sum();
  std::set<std::vector<long long>> sols;
  std::vector<long long> z(n, 0);
  std::vector<long long> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = -static_cast<long long>(std::ceil(row_sums(i))) - 1;
    hi[i] = static_cast<long long>(std::ceil(row_sums(i))) + 1;
    z[i] = lo[i];
  }
  while (true) {
    Eigen::VectorXd zv(n);
    for (int i = 0; i < n; ++i) zv(i) = static_cast<double>(z[i]);
    Eigen::VectorXd x = lu.solve(zv);
    bool inside = true;
    std::vector<long long> key(n);
    for (int i = 0; i < n; ++i) {
      double xi = x(i);
      if (xi < -1e-9 || xi >= 1.0 - 1e-9) {
        inside = false;
        break;
      }
      key[i] = std::llround(xi * denom_scale);
    }
    if (inside) sols.insert(key);
    int i = 0;
    for (; i < n; ++i) {
      if (++z[i] <= hi[i]) break;
      z[i] = lo[i];
    }
    if (i == n) break;
  }
  return sols;
}

IntMatrix cat_map() {
  IntMatrix a(2, 2);
  a << 2, 1, 1, 1;
  return a;
}

IntMatrix mat_power(IntMatrix a, int k) {
  IntMatrix r = IntMatrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

}  // namespace

TEST_CASE("smith normal form reconstructs the input") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-6, 6);
  for (int trial = 0; trial < 200; ++trial) {
    int rows = 1 + static_cast<int>(rng() % 4);
    int cols = 1 + static_cast<int>(rng() % 4);
    IntMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = d(rng);
    auto snf = smith_normal_form(a);
    CHECK(snf.P * a * snf.Q == snf.D);
    CHECK(std::abs(integer_determinant(snf.P)) == 1);
    CHECK(std::abs(integer_determinant(snf.Q)) == 1);
    // diagonal, nonnegative, divisibility chain
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (i != j) CHECK(snf.D(i, j) == 0);
    for (int t = 0; t + 1 < std::min(rows, cols); ++t) {
      CHECK(snf.D(t, t) >= 0);
      if (snf.D(t, t) != 0) CHECK(snf.D(t + 1, t + 1) % snf.D(t, t) == 0);
    }
  }
}

TEST_CASE("integer determinant agrees with Eigen on random matrices") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng() % 4);
    IntMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = d(rng);
    double ref = a.cast<double>().determinant();
    CHECK(integer_determinant(a) == std::llround(ref));
  }
}

TEST_CASE("lattice congruence solutions match brute force for cat map powers") {
  IntMatrix a = cat_map();
  const long long expected_counts[] = {0, 1, 5, 16, 45, 121};
  for (int nu = 1; nu <= 5; ++nu) {
    IntMatrix m = mat_power(a, nu) - IntMatrix::Identity(2, 2);
    auto sols = solve_lattice_congruence(m);
    CHECK(sols.component_count == expected_counts[nu]);
    CHECK(sols.points.size() == static_cast<std::size_t>(expected_counts[nu]));
    CHECK(sols.free_directions.empty());
    CHECK(std::abs(integer_determinant(m)) == expected_counts[nu]);

    // exactness: every reported point solves the congruence exactly
    for (const auto& pt : sols.points) {
      IntVector mx = m * pt.num;
      for (int i = 0; i < 2; ++i) CHECK(mx(i) % pt.den == 0);
    }

    if (nu <= 3) {
      std::int64_t den = sols.points.front().den;
      auto brute = brute_force_torus_solutions(m, static_cast<int>(den));
      CHECK(brute.size() == static_cast<std::size_t>(expected_counts[nu]));
      std::set<std::vector<long long>> got;
      for (const auto& pt : sols.points)
        got.insert({pt.num(0), pt.num(1)});
      CHECK(got == brute);
    }
  }
}

TEST_CASE("affine congruence: fixed points of the cat map") {
  IntMatrix m = IntMatrix::Identity(2, 2) - cat_map();  // (id - A) x === c
  Eigen::VectorXd c(2);
  c << 0.0, 0.0;
  auto sols = solve_lattice_congruence(m, c);
  CHECK(sols.consistent);
  CHECK(sols.component_count == 1);
  CHECK(sols.points.size() == 1);
  CHECK(sols.points[0].cwiseAbs().maxCoeff() < 1e-12);

  // shifted map still has exactly |det(id-A)| = 1 fixed point
  Eigen::VectorXd c2(2);
  c2 << 0.3, 0.45;
  auto sols2 = solve_lattice_congruence(m, c2);
  CHECK(sols2.consistent);
  CHECK(sols2.points.size() == 1);
  Eigen::VectorXd x = sols2.points[0];
  Eigen::VectorXd residual = m.cast<double>() * x - c2;
  for (int i = 0; i < 2; ++i) {
    double fr = residual(i) - std::round(residual(i));
    CHECK(std::abs(fr) < 1e-9);
  }
}

TEST_CASE("inconsistent congruence is detected") {
  // two parallel circles x2 = 0.2 and x2 = 0.7 never meet
  IntMatrix c(2, 2);
  c << 0, 1, 0, 1;
  Eigen::VectorXd r(2);
  r << 0.2, 0.7;
  auto sols = solve_lattice_congruence(c, r);
  CHECK_FALSE(sols.consistent);
}

TEST_CASE("integer kernel is the expected sublattice") {
  IntMatrix a(1, 3);
  a << 1, 2, 3;
  auto kernel = integer_kernel(a);
  REQUIRE(kernel.size() == 2);
  for (const auto& v : kernel) CHECK(a.row(0).dot(v) == 0);
  // saturation: the kernel basis spans all integer solutions; check a known one
  IntMatrix basis(3, 2);
  basis.col(0) = kernel[0];
  basis.col(1) = kernel[1];
  IntVector known(3);
  known << 1, 1, -1;
  // solve basis * y = known over the rationals; solution must be integral
  Eigen::Vector2d y =
      basis.cast<double>().colPivHouseholderQr().solve(known.cast<double>());
  CHECK(std::abs(y(0) - std::round(y(0))) < 1e-9);
  CHECK(std::abs(y(1) - std::round(y(1))) < 1e-9);
}
