#include "leafcalc/subtorus.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace leafcalc {

namespace {

constexpr double kLeafTol = 1e-12;

Eigen::MatrixXd gram_schmidt_columns(const std::vector<Eigen::VectorXd>& vecs, int n,
                                     double drop_tol = 1e-10) {
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(vecs.size()));
  int col = 0;
  for (const auto& raw : vecs) {
    Eigen::VectorXd v = raw;
    for (int j = 0; j < col; ++j) v -= out.col(j).dot(v) * out.col(j);
    double norm = v.norm();
    if (norm < drop_tol) continue;
    out.col(col++) = v / norm;
  }
  return out.leftCols(col);
}

// Orthonormal complement of `inside` (n x k, orthonormal) within the column
// span of `space` (n x p, orthonormal).
Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& inside,
                                       const Eigen::MatrixXd& space) {
  std::vector<Eigen::VectorXd> candidates;
  for (int i = 0; i < space.cols(); ++i) {
    Eigen::VectorXd v = space.col(i);
    v -= inside * (inside.transpose() * v);
    candidates.push_back(v);
  }
  Eigen::MatrixXd comp = gram_schmidt_columns(candidates, static_cast<int>(space.rows()));
  if (comp.cols() != space.cols() - inside.cols())
    throw std::runtime_error("subtorus: complement construction failed");
  return comp;
}

}  // namespace

LinearSubtorus::LinearSubtorus(ModelPtr model, Eigen::VectorXd basepoint,
                               std::vector<IntVector> directions)
    : model_(std::move(model)), basepoint_(std::move(basepoint)),
      directions_(std::move(directions)) {
  const int n = model_->ambient_dim();
  if (basepoint_.size() != n) throw std::invalid_argument("subtorus: basepoint dimension");
  for (const auto& v : directions_)
    if (v.size() != n) throw std::invalid_argument("subtorus: direction dimension");

  const int d = dim();
  Eigen::MatrixXd D(n, d);
  for (int j = 0; j < d; ++j) D.col(j) = directions_[static_cast<std::size_t>(j)].cast<double>();
  if (d > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
    if (lu.rank() != d) throw std::invalid_argument("subtorus: dependent directions");
  }

  // primitivity: the directions must generate the full lattice span cap Z^n
  if (d > 0) {
    IntMatrix Dint(n, d);
    for (int j = 0; j < d; ++j) Dint.col(j) = directions_[static_cast<std::size_t>(j)];
    auto snf = smith_normal_form(Dint);
    std::int64_t index = 1;
    for (int t = 0; t < snf.rank; ++t) index *= snf.D(t, t);
    if (std::abs(index) != 1)
      throw std::invalid_argument("subtorus: directions do not generate a primitive lattice");
  }

  // split leafwise-first; mixed spans (leafwise content hidden in combinations
  // of non-leafwise directions) are not supported
  Eigen::MatrixXd PQ = model_->transverse_projector();
  std::vector<Eigen::VectorXd> leaf_dirs, other_dirs;
  bool seen_other = false;
  for (const auto& v : directions_) {
    Eigen::VectorXd vd = v.cast<double>();
    if ((PQ * vd).norm() < kLeafTol) {
      if (seen_other)
        throw std::invalid_argument("subtorus: order directions leafwise-first");
      leaf_dirs.push_back(vd);
    } else {
      seen_other = true;
      other_dirs.push_back(vd);
    }
  }
  k_ = static_cast<int>(leaf_dirs.size());
  u_ = static_cast<int>(other_dirs.size());

  leaf_frame_ = gram_schmidt_columns(leaf_dirs, n);
  if (leaf_frame_.cols() != k_) throw std::invalid_argument("subtorus: dependent leafwise part");

  std::vector<Eigen::VectorXd> q_projections;
  for (const auto& v : other_dirs) q_projections.push_back(PQ * v);
  trans_frame_ = gram_schmidt_columns(q_projections, n);
  if (trans_frame_.cols() != u_)
    throw std::invalid_argument(
        "subtorus: span has hidden leafwise content (unsupported configuration)");

  // measure factor: foliated volume of the parallelepiped of the directions
  if (d > 0) {
    Eigen::MatrixXd M(d, d);
    M.topRows(k_) = leaf_frame_.transpose() * D;
    M.bottomRows(u_) = trans_frame_.transpose() * D;
    measure_factor_ = std::abs(small_determinant(M));
  } else {
    measure_factor_ = 1.0;
  }

  // normal frames inside F and Q
  normal_leaf_ = orthonormal_complement(leaf_frame_, model_->tangential_frame());
  normal_trans_ = orthonormal_complement(trans_frame_, model_->transverse_frame());

  // orient the leafwise normal so (leafwise frame, normal frame) is positive
  const int p = model_->leaf_dim();
  if (normal_leaf_.cols() > 0) {
    Eigen::MatrixXd full(p, p);
    full.leftCols(k_) = model_->tangential_frame().transpose() * leaf_frame_;
    full.rightCols(p - k_) = model_->tangential_frame().transpose() * normal_leaf_;
    double det = full.determinant() * model_->orientation();
    if (det < 0) normal_leaf_.col(normal_leaf_.cols() - 1) *= -1.0;
  }
}

LinearSubtorus LinearSubtorus::translated(const Eigen::VectorXd& new_basepoint) const {
  return LinearSubtorus(model_, new_basepoint, directions_);
}

double LinearSubtorus::frame_minor(IndexSet I) const {
  if (I.degree() != k_) return 0.0;
  if (k_ == 0) return 1.0;
  Eigen::MatrixXd coords = model_->tangential_frame().transpose() * leaf_frame_;  // p x k
  auto rows = I.elements();
  Eigen::MatrixXd minor(k_, k_);
  for (int a = 0; a < k_; ++a)
    for (int b = 0; b < k_; ++b) minor(a, b) = coords(rows[static_cast<std::size_t>(a)], b);
  return small_determinant(minor);
}

double LinearSubtorus::pair(const TangentialForm& omega) const {
  if (omega.model() != model_ && !omega.model()->same_geometry(*model_))
    throw std::invalid_argument("subtorus pairing: model mismatch");
  if (omega.degree() != k_)
    throw std::invalid_argument("subtorus pairing: form degree must equal leaf dimension");

  // precompute the frame minors once per index set
  std::map<IndexSet, double> minors;
  Complex acc(0.0, 0.0);
  for (const auto& [key, c] : omega.terms()) {
    bool survives = true;
    for (const auto& v : directions_) {
      std::int64_t mv = 0;
      for (int i = 0; i < model_->ambient_dim(); ++i) mv += key.mode[i] * v(i);
      if (mv != 0) {
        survives = false;
        break;
      }
    }
    if (!survives) continue;
    auto [it, inserted] = minors.try_emplace(key.idx, 0.0);
    if (inserted) it->second = frame_minor(key.idx);
    if (it->second == 0.0) continue;
    double phase = 2.0 * std::numbers::pi * dot(key.mode, basepoint_);
    acc += c * Complex(std::cos(phase), std::sin(phase)) * it->second;
  }
  return measure_factor_ * acc.real();
}

double LinearSubtorus::pair_quadrature(
    const std::function<double(const Eigen::VectorXd&)>& integrand, int samples_per_axis) const {
  const int d = dim();
  if (d == 0) return measure_factor_ * integrand(torus_wrap(basepoint_));

  const int total_axes = d;
  std::vector<int> counter(static_cast<std::size_t>(total_axes), 0);
  double acc = 0.0;
  std::int64_t total = 1;
  for (int i = 0; i < total_axes; ++i) total *= samples_per_axis;
  Eigen::MatrixXd D(model_->ambient_dim(), d);
  for (int j = 0; j < d; ++j) D.col(j) = directions_[static_cast<std::size_t>(j)].cast<double>();

  for (std::int64_t it = 0; it < total; ++it) {
    Eigen::VectorXd t(d);
    for (int j = 0; j < d; ++j)
      t(j) = static_cast<double>(counter[static_cast<std::size_t>(j)]) / samples_per_axis;
    acc += integrand(torus_wrap(basepoint_ + D * t));
    for (int j = 0; j < total_axes; ++j) {
      if (++counter[static_cast<std::size_t>(j)] < samples_per_axis) break;
      counter[static_cast<std::size_t>(j)] = 0;
    }
  }
  return measure_factor_ * acc / static_cast<double>(total);
}

std::vector<IntVector> conormal_lattice(const LinearSubtorus& s) {
  const int n = s.model()->ambient_dim();
  const int d = s.dim();
  if (d == 0) {
    std::vector<IntVector> full;
    for (int i = 0; i < n; ++i) full.push_back(IntVector::Unit(n, i));
    return full;
  }
  IntMatrix Dt(d, n);
  for (int j = 0; j < d; ++j) Dt.row(j) = s.directions()[static_cast<std::size_t>(j)].transpose();
  return integer_kernel(Dt);
}

TransversalityResult check_transversal_submanifolds(const LinearSubtorus& s,
                                                    const LinearSubtorus& t) {
  TransversalityResult out;
  if (s.model() != t.model() && !s.model()->same_geometry(*t.model()))
    throw std::invalid_argument("transversality: different models");
  const auto& model = *s.model();
  const int n = model.ambient_dim();
  const int p = model.leaf_dim();

  // full spans must fill R^n
  Eigen::MatrixXd both(n, s.dim() + t.dim());
  for (int j = 0; j < s.dim(); ++j)
    both.col(j) = s.directions()[static_cast<std::size_t>(j)].cast<double>();
  for (int j = 0; j < t.dim(); ++j)
    both.col(s.dim() + j) = t.directions()[static_cast<std::size_t>(j)].cast<double>();
  bool full_span = false;
  if (both.cols() >= n) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(both);
    lu.setThreshold(1e-10);
    full_span = (lu.rank() == n);
  }

  // leafwise spans must fill F
  Eigen::MatrixXd leaf_both(n, s.leaf_dim() + t.leaf_dim());
  leaf_both.leftCols(s.leaf_dim()) = s.leafwise_frame();
  leaf_both.rightCols(t.leaf_dim()) = t.leafwise_frame();
  bool leaf_span = false;
  if (leaf_both.cols() >= p) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(leaf_both);
    lu.setThreshold(1e-10);
    leaf_span = (lu.rank() == p);
  }

  out.transversal = full_span && leaf_span;

  // intersection solved regardless of transversality: emptiness is also
  // meaningful for non-transversal pairs (disjoint supports)
  auto cs = conormal_lattice(s);
  auto ct = conormal_lattice(t);
  const int rows = static_cast<int>(cs.size() + ct.size());
  IntMatrix C(rows, n);
  Eigen::VectorXd r(rows);
  int row = 0;
  for (const auto& c : cs) {
    C.row(row) = c.transpose();
    r(row) = c.cast<double>().dot(s.basepoint());
    ++row;
  }
  for (const auto& c : ct) {
    C.row(row) = c.transpose();
    r(row) = c.cast<double>().dot(t.basepoint());
    ++row;
  }

  auto sols = solve_lattice_congruence(C, r);
  out.nonempty = sols.consistent;
  if (!out.nonempty) return out;
  out.component_count = sols.component_count;

  // order intersection directions leafwise-first
  Eigen::MatrixXd PQ = model.transverse_projector();
  std::vector<IntVector> dirs;
  for (const auto& v : sols.free_directions)
    if ((PQ * v.cast<double>()).norm() < 1e-12) dirs.push_back(v);
  for (const auto& v : sols.free_directions)
    if ((PQ * v.cast<double>()).norm() >= 1e-12) dirs.push_back(v);

  for (const auto& base : sols.points)
    out.components.emplace_back(s.model(), base, dirs);
  return out;
}

double h_factor(const LinearSubtorus& s, const LinearSubtorus& t) {
  auto inter = check_transversal_submanifolds(s, t);
  if (!inter.transversal || !inter.nonempty)
    throw std::invalid_argument("h_factor: subtori must intersect transversally");
  const auto& cap = inter.components.front();
  const int n = s.model()->ambient_dim();

  // orthonormal basis of pi_Q(V_cap), then completions inside pi_Q(V_S) and
  // pi_Q(V_T); h is fixed by Gram determinants of the combined system
  Eigen::MatrixXd e_cap = cap.transverse_projection_frame();

  auto completion = [&](const LinearSubtorus& x) {
    std::vector<Eigen::VectorXd> cand;
    for (int j = 0; j < x.transverse_projection_frame().cols(); ++j) {
      Eigen::VectorXd v = x.transverse_projection_frame().col(j);
      v -= e_cap * (e_cap.transpose() * v);
      cand.push_back(v);
    }
    return gram_schmidt_columns(cand, n);
  };
  Eigen::MatrixXd gs = completion(s);
  Eigen::MatrixXd gt = completion(t);

  const int q = s.model()->transverse_dim();
  if (e_cap.cols() + gs.cols() + gt.cols() != q)
    throw std::runtime_error("h_factor: transverse dimensions do not add up");

  Eigen::MatrixXd all(n, q);
  all.leftCols(e_cap.cols()) = e_cap;
  all.middleCols(e_cap.cols(), gs.cols()) = gs;
  all.rightCols(gt.cols()) = gt;
  if (q == 0) return 1.0;
  double gram_det = (all.transpose() * all).determinant();
  if (gram_det <= 0) throw std::runtime_error("h_factor: degenerate transverse Gram matrix");
  return 1.0 / std::sqrt(gram_det);
}

}  // namespace leafcalc
