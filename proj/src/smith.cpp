#include "leafcalc/smith.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace leafcalc {

namespace {

void swap_rows(IntMatrix& s, IntMatrix& p, int i, int j) {
  s.row(i).swap(s.row(j));
  p.row(i).swap(p.row(j));
}

void swap_cols(IntMatrix& s, IntMatrix& q, int i, int j) {
  s.col(i).swap(s.col(j));
  q.col(i).swap(q.col(j));
}

// row i -= f * row k, tracked in P
void add_row(IntMatrix& s, IntMatrix& p, int i, int k, std::int64_t f) {
  s.row(i) -= f * s.row(k);
  p.row(i) -= f * p.row(k);
}

// col j -= f * col k, tracked in Q
void add_col(IntMatrix& s, IntMatrix& q, int j, int k, std::int64_t f) {
  s.col(j) -= f * s.col(k);
  q.col(j) -= f * q.col(k);
}

void negate_row(IntMatrix& s, IntMatrix& p, int i) {
  s.row(i) = -s.row(i);
  p.row(i) = -p.row(i);
}

}  // namespace

SmithDecomposition smith_normal_form(const IntMatrix& a) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  SmithDecomposition d;
  d.P = IntMatrix::Identity(rows, rows);
  d.Q = IntMatrix::Identity(cols, cols);
  d.D = a;
  IntMatrix& s = d.D;

  const int nmin = std::min(rows, cols);
  for (int t = 0; t < nmin; ++t) {
    // find the nonzero entry of smallest magnitude in the trailing block
    int pi = -1, pj = -1;
    std::int64_t best = 0;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j) {
        std::int64_t v = std::abs(s(i, j));
        if (v != 0 && (pi < 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // block is zero
    if (pi != t) swap_rows(s, d.P, pi, t);
    if (pj != t) swap_cols(s, d.Q, pj, t);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < rows; ++i) {
        if (s(i, t) == 0) continue;
        std::int64_t f = s(i, t) / s(t, t);
        add_row(s, d.P, i, t, f);
        if (s(i, t) != 0) {  // remainder became the smaller pivot
          swap_rows(s, d.P, i, t);
          clean = false;
        }
      }
      for (int j = t + 1; j < cols; ++j) {
        if (s(t, j) == 0) continue;
        std::int64_t f = s(t, j) / s(t, t);
        add_col(s, d.Q, j, t, f);
        if (s(t, j) != 0) {
          swap_cols(s, d.Q, j, t);
          clean = false;
        }
      }
    }

    // divisibility: d_t must divide every entry of the trailing block
    bool restart = false;
    for (int i = t + 1; i < rows && !restart; ++i)
      for (int j = t + 1; j < cols && !restart; ++j)
        if (s(i, j) % s(t, t) != 0) {
          add_row(s, d.P, t, i, -1);  // row t += row i, reruns the reduction
          restart = true;
        }
    if (restart) {
      --t;
      continue;
    }
    if (s(t, t) < 0) negate_row(s, d.P, t);
  }

  d.rank = 0;
  for (int t = 0; t < nmin; ++t)
    if (s(t, t) != 0) ++d.rank;
  return d;
}

std::int64_t integer_determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("integer_determinant: square matrix required");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1;
  // Bareiss fraction-free elimination
  IntMatrix m = a;
  std::int64_t prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (m(i, k) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      m.row(k).swap(m.row(piv));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

namespace {

std::int64_t positive_mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

HomogeneousSolutions solve_lattice_congruence(const IntMatrix& c) {
  const int n = static_cast<int>(c.cols());
  SmithDecomposition snf = smith_normal_form(c);
  HomogeneousSolutions out;

  std::vector<std::int64_t> periods;
  for (int t = 0; t < snf.rank; ++t) periods.push_back(snf.D(t, t));
  for (int t = snf.rank; t < n; ++t) out.free_directions.push_back(snf.Q.col(t));

  std::int64_t count = 1;
  for (auto d : periods) count *= d;
  out.component_count = count;

  std::int64_t lcm = 1;
  for (auto d : periods) lcm = std::lcm(lcm, d);

  // w_t = k_t / d_t for t < rank, 0 on the free coordinates; x = Q w
  std::vector<std::int64_t> k(periods.size(), 0);
  out.points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t it = 0; it < count; ++it) {
    RationalPoint pt;
    pt.den = lcm;
    pt.num = IntVector::Zero(n);
    for (int j = 0; j < n; ++j) {
      std::int64_t acc = 0;
      for (std::size_t t = 0; t < periods.size(); ++t)
        acc += snf.Q(j, static_cast<int>(t)) * k[t] * (lcm / periods[t]);
      pt.num(j) = positive_mod(acc, lcm);
    }
    out.points.push_back(std::move(pt));
    // odometer over the invariant factors
    for (std::size_t t = 0; t < periods.size(); ++t) {
      if (++k[t] < periods[t]) break;
      k[t] = 0;
    }
  }
  return out;
}

AffineSolutions solve_lattice_congruence(const IntMatrix& c, const Eigen::VectorXd& r, double tol) {
  const int rows = static_cast<int>(c.rows());
  const int n = static_cast<int>(c.cols());
  if (r.size() != rows) throw std::invalid_argument("solve_lattice_congruence: rhs size mismatch");
  SmithDecomposition snf = smith_normal_form(c);
  AffineSolutions out;

  Eigen::VectorXd pr(rows);
  for (int i = 0; i < rows; ++i) {
    double acc = 0;
    for (int j = 0; j < rows; ++j) acc += static_cast<double>(snf.P(i, j)) * r(j);
    pr(i) = acc;
  }

  // rows of D beyond the rank force integrality of the transformed rhs
  for (int i = snf.rank; i < rows; ++i) {
    double fr = pr(i) - std::round(pr(i));
    if (std::abs(fr) > tol) {
      out.consistent = false;
      return out;
    }
  }
  out.consistent = true;

  std::vector<std::int64_t> periods;
  for (int t = 0; t < snf.rank; ++t) periods.push_back(snf.D(t, t));
  for (int t = snf.rank; t < n; ++t) out.free_directions.push_back(snf.Q.col(t));

  std::int64_t count = 1;
  for (auto d : periods) count *= d;
  out.component_count = count;

  std::vector<std::int64_t> k(periods.size(), 0);
  out.points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t it = 0; it < count; ++it) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      double acc = 0;
      for (std::size_t t = 0; t < periods.size(); ++t) {
        double w = (pr(static_cast<int>(t)) + static_cast<double>(k[t])) /
                   static_cast<double>(periods[t]);
        acc += static_cast<double>(snf.Q(j, static_cast<int>(t))) * w;
      }
      x(j) = acc - std::floor(acc);
      if (x(j) >= 1.0) x(j) = 0.0;
    }
    out.points.push_back(std::move(x));
    for (std::size_t t = 0; t < periods.size(); ++t) {
      if (++k[t] < periods[t]) break;
      k[t] = 0;
    }
  }
  return out;
}

std::vector<IntVector> integer_kernel(const IntMatrix& a) {
  SmithDecomposition snf = smith_normal_form(a);
  std::vector<IntVector> kernel;
  for (int t = snf.rank; t < a.cols(); ++t) kernel.push_back(snf.Q.col(t));
  return kernel;
}

}  // namespace leafcalc
