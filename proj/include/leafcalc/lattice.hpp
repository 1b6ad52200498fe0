#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace leafcalc {

// Hard cap on the ambient torus dimension. Product models of two T^2
// factors plus a suspension base stay well below this.
inline constexpr int kMaxAmbientDim = 8;

// Coefficients with magnitude below this floor are dropped after every
// form operation so sparse coefficient tables stay finite under
// composition.
inline constexpr double kPruneFloor = 1e-14;

/// Integer Fourier mode on T^n.
struct LatticeMode {
  std::array<std::int64_t, kMaxAmbientDim> m{};
  int dim = 0;

  LatticeMode() = default;
  explicit LatticeMode(int n) : dim(n) {
    if (n < 0 || n > kMaxAmbientDim) throw std::invalid_argument("LatticeMode: bad dimension");
  }

  static LatticeMode zero(int n) { return LatticeMode(n); }

  std::int64_t operator[](int i) const { return m[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) { return m[static_cast<std::size_t>(i)]; }

  bool is_zero() const {
    for (int i = 0; i < dim; ++i)
      if (m[static_cast<std::size_t>(i)] != 0) return false;
    return true;
  }

  LatticeMode operator+(const LatticeMode& o) const {
    LatticeMode r(dim);
    for (int i = 0; i < dim; ++i) r[i] = (*this)[i] + o[i];
    return r;
  }

  LatticeMode operator-() const {
    LatticeMode r(dim);
    for (int i = 0; i < dim; ++i) r[i] = -(*this)[i];
    return r;
  }

  std::int64_t sup_norm() const {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s = std::max(s, std::abs((*this)[i]));
    return s;
  }

  friend auto operator<=>(const LatticeMode&, const LatticeMode&) = default;
};

/// <m, v> for a real vector v of matching dimension.
inline double dot(const LatticeMode& m, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (int i = 0; i < m.dim; ++i) s += static_cast<double>(m[i]) * v(i);
  return s;
}

/// <m, x> for a point x given as raw doubles.
inline double dot(const LatticeMode& m, const double* x) {
  double s = 0.0;
  for (int i = 0; i < m.dim; ++i) s += static_cast<double>(m[i]) * x[i];
  return s;
}

/// Strictly increasing subset of the tangential frame indices {1,...,p},
/// stored as a bitmask (bit j <-> frame index j+1).
struct IndexSet {
  std::uint32_t bits = 0;

  IndexSet() = default;
  explicit IndexSet(std::uint32_t b) : bits(b) {}

  static IndexSet empty() { return IndexSet(); }
  static IndexSet full(int p) { return IndexSet((p == 32) ? ~0u : ((1u << p) - 1u)); }
  static IndexSet single(int j) { return IndexSet(1u << j); }  // j is 0-based

  int degree() const { return __builtin_popcount(bits); }
  bool contains(int j) const { return (bits >> j) & 1u; }
  bool disjoint(IndexSet o) const { return (bits & o.bits) == 0; }
  IndexSet set_union(IndexSet o) const { return IndexSet(bits | o.bits); }
  IndexSet complement(int p) const { return IndexSet(full(p).bits & ~bits); }

  /// 0-based frame indices in increasing order.
  std::vector<int> elements() const {
    std::vector<int> e;
    e.reserve(static_cast<std::size_t>(degree()));
    for (std::uint32_t b = bits; b;) {
      int j = __builtin_ctz(b);
      e.push_back(j);
      b &= b - 1;
    }
    return e;
  }

  friend auto operator<=>(const IndexSet&, const IndexSet&) = default;
};

/// Sign of the shuffle sorting theta^I ^ theta^J into theta^{I u J}.
/// Returns 0 when the sets overlap.
inline int wedge_sign(IndexSet a, IndexSet b) {
  if (!a.disjoint(b)) return 0;
  int inv = 0;
  for (std::uint32_t x = b.bits; x;) {
    int j = __builtin_ctz(x);
    // elements of a that are greater than j each contribute one transposition
    inv += __builtin_popcount(a.bits >> (j + 1));
    x &= x - 1;
  }
  return (inv & 1) ? -1 : 1;
}

/// Sign of the permutation (I, I^c) of (1,...,p); this is the coefficient of
/// the Hodge star on frame forms: star(theta^I) = sign * theta^{I^c}.
inline int complement_sign(IndexSet I, int p) { return wedge_sign(I, I.complement(p)); }

/// All index sets of the given degree on {1,...,p}, in increasing bitmask
/// order (the canonical ordering used for basis enumeration everywhere).
inline std::vector<IndexSet> index_sets_of_degree(int p, int k) {
  std::vector<IndexSet> out;
  for (std::uint32_t b = 0; b < (1u << p); ++b)
    if (__builtin_popcount(b) == k) out.emplace_back(b);
  return out;
}

/// Determinant by cofactor expansion for the small frame minors; Eigen's
/// dynamic-size determinant pivots through an LU factorization and loses
/// exactness on integer-valued entries.
inline double small_determinant(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  switch (n) {
    case 0: return 1.0;
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(1, 0) * m(0, 1);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(2, 1) * m(1, 2)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(2, 0) * m(1, 2)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(2, 0) * m(1, 1));
    default: {
      if (n > 5) return m.determinant();
      double acc = 0.0;
      double sign = 1.0;
      for (int j = 0; j < n; ++j) {
        Eigen::MatrixXd sub(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
          int cc = 0;
          for (int c = 0; c < n; ++c) {
            if (c == j) continue;
            sub(r - 1, cc++) = m(r, c);
          }
        }
        acc += sign * m(0, j) * small_determinant(sub);
        sign = -sign;
      }
      return acc;
    }
  }
}

}  // namespace leafcalc
