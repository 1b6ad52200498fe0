#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace leafcalc {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Smith normal form P * A * Q = D with P, Q unimodular and D diagonal,
/// diagonal entries nonnegative with d_1 | d_2 | ... .
struct SmithDecomposition {
  IntMatrix P;  // rows x rows
  IntMatrix Q;  // cols x cols
  IntMatrix D;  // rows x cols
  int rank = 0;
};

SmithDecomposition smith_normal_form(const IntMatrix& a);

/// Exact integer determinant (fraction-free elimination).
std::int64_t integer_determinant(const IntMatrix& a);

/// A point of the torus T^n with exact rational coordinates num/den.
struct RationalPoint {
  IntVector num;  // reduced modulo den into [0, den)
  std::int64_t den = 1;

  Eigen::VectorXd as_double() const {
    Eigen::VectorXd x(num.size());
    for (Eigen::Index i = 0; i < num.size(); ++i)
      x(i) = static_cast<double>(num(i)) / static_cast<double>(den);
    return x;
  }

  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
  friend auto operator<=>(const RationalPoint& a, const RationalPoint& b) {
    for (Eigen::Index i = 0; i < a.num.size(); ++i)
      if (a.num(i) != b.num(i)) return a.num(i) <=> b.num(i);
    return a.den <=> b.den;
  }
};

/// Solutions on the torus of C x === 0 (mod Z^rows) for an integer matrix C.
/// The solution set is a finite union of translates of the connected subgroup
/// spanned by `free_directions`; `points` lists one exact representative per
/// translate (product of the nonunit invariant factors many).
struct HomogeneousSolutions {
  std::vector<RationalPoint> points;
  std::vector<IntVector> free_directions;  // integer vectors, primitive
  std::int64_t component_count = 0;
};

HomogeneousSolutions solve_lattice_congruence(const IntMatrix& c);

/// Solutions of C x === r (mod Z^rows) with a real right-hand side.
/// `consistent` is false when the congruence has no solution (within tol on
/// the constrained rows).
struct AffineSolutions {
  bool consistent = false;
  std::vector<Eigen::VectorXd> points;  // reduced into [0,1)^n
  std::vector<IntVector> free_directions;
  std::int64_t component_count = 0;
};

AffineSolutions solve_lattice_congruence(const IntMatrix& c, const Eigen::VectorXd& r,
                                         double tol = 1e-9);

/// Basis of the integer kernel {z in Z^n : A z = 0} (saturated).
std::vector<IntVector> integer_kernel(const IntMatrix& a);

}  // namespace leafcalc
