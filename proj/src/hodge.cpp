#include "leafcalc/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "leafcalc/parallel.hpp"

namespace leafcalc {

namespace {

constexpr std::size_t kNearResonanceKept = 12;

bool resonant(const FoliatedTorusModel& model, const LatticeMode& m, double eps) {
  for (int j = 0; j < model.leaf_dim(); ++j)
    if (std::abs(dot(m, model.tangential_vector(j))) > eps) return false;
  return true;
}

double divisor_of(const FoliatedTorusModel& model, const LatticeMode& m) {
  double d = 0.0;
  for (int j = 0; j < model.leaf_dim(); ++j)
    d = std::max(d, std::abs(dot(m, model.tangential_vector(j))));
  return d;
}

}  // namespace

std::vector<int> CohomologyBasis::dimensions() const {
  std::vector<int> dims;
  for (const auto& level : levels) dims.push_back(static_cast<int>(level.reps.size()));
  return dims;
}

nlohmann::json CohomologyBasis::report() const {
  nlohmann::json j;
  j["dimensions"] = dimensions();
  j["finite_dimensional"] = finite_dimensional;
  j["truncation"] = {{"m_max", truncation.m_max}, {"eps_res", truncation.eps_res}};
  nlohmann::json near = nlohmann::json::array();
  for (const auto& nr : near_resonances) {
    nlohmann::json e;
    nlohmann::json mode = nlohmann::json::array();
    for (int i = 0; i < nr.mode.dim; ++i) mode.push_back(nr.mode[i]);
    e["mode"] = mode;
    e["divisor"] = nr.divisor;
    near.push_back(e);
  }
  j["near_resonances"] = near;
  return j;
}

CohomologyBasis harmonic_basis(ModelPtr model, const SpectralTruncation& trunc) {
  if (trunc.m_max < 1 || trunc.eps_res <= 0)
    throw std::invalid_argument("harmonic_basis: invalid truncation");
  const int n = model->ambient_dim();
  const std::int64_t side = 2 * static_cast<std::int64_t>(trunc.m_max) + 1;
  std::int64_t box = 1;
  for (int i = 0; i < n; ++i) box *= side;

  // parallel scan over the box; per-chunk results merged in chunk order so
  // the outcome is schedule independent
  const int workers = max_threads();
  const std::int64_t chunk = (box + workers - 1) / workers;
  std::vector<std::vector<LatticeMode>> found(static_cast<std::size_t>(workers));
  std::vector<std::vector<NearResonance>> near(static_cast<std::size_t>(workers));
  std::mutex done;

  parallel_for(box, [&](std::int64_t begin, std::int64_t end) {
    const std::size_t slot = static_cast<std::size_t>(begin / chunk);
    std::vector<LatticeMode> local;
    std::vector<NearResonance> local_near;
    for (std::int64_t flat = begin; flat < end; ++flat) {
      LatticeMode m(n);
      std::int64_t rest = flat;
      for (int i = 0; i < n; ++i) {
        m[i] = static_cast<std::int64_t>(rest % side) - trunc.m_max;
        rest /= side;
      }
      double d = divisor_of(*model, m);
      if (d <= trunc.eps_res) {
        local.push_back(m);
      } else if (local_near.size() < kNearResonanceKept ||
                 d < local_near.back().divisor) {
        local_near.push_back({m, d});
        std::sort(local_near.begin(), local_near.end(),
                  [](const NearResonance& a, const NearResonance& b) {
                    return a.divisor < b.divisor || (a.divisor == b.divisor && a.mode < b.mode);
                  });
        if (local_near.size() > kNearResonanceKept) local_near.resize(kNearResonanceKept);
      }
    }
    std::lock_guard<std::mutex> lock(done);
    found[slot] = std::move(local);
    near[slot] = std::move(local_near);
  });

  CohomologyBasis basis;
  basis.model = model;
  basis.truncation = trunc;
  for (auto& group : found)
    basis.resonant_modes.insert(basis.resonant_modes.end(), group.begin(), group.end());
  std::sort(basis.resonant_modes.begin(), basis.resonant_modes.end());
  for (auto& group : near)
    basis.near_resonances.insert(basis.near_resonances.end(), group.begin(), group.end());
  std::sort(basis.near_resonances.begin(), basis.near_resonances.end(),
            [](const NearResonance& a, const NearResonance& b) {
              return a.divisor < b.divisor || (a.divisor == b.divisor && a.mode < b.mode);
            });
  if (basis.near_resonances.size() > kNearResonanceKept)
    basis.near_resonances.resize(kNearResonanceKept);

  basis.finite_dimensional =
      basis.resonant_modes.size() == 1 && basis.resonant_modes.front().is_zero();

  const int p = model->leaf_dim();
  for (int kappa = 0; kappa <= p; ++kappa) {
    CohomologyLevel level;
    level.degree = kappa;
    for (const auto& m : basis.resonant_modes)
      for (IndexSet I : index_sets_of_degree(p, kappa)) {
        TangentialForm f(model, kappa);
        f.add_term(m, I, Complex(1.0, 0.0));
        f.set_real_flag(m.is_zero());
        level.reps.push_back(std::move(f));
      }
    const int dim = static_cast<int>(level.reps.size());
    level.gram = Eigen::MatrixXd(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        level.gram(i, j) = l2_inner(level.reps[static_cast<std::size_t>(i)],
                                    level.reps[static_cast<std::size_t>(j)]);
    basis.levels.push_back(std::move(level));
  }
  return basis;
}

TangentialForm hodge_project(const TangentialForm& omega, const SpectralTruncation& trunc) {
  TangentialForm r(omega.model(), omega.degree());
  for (const auto& [key, c] : omega.terms())
    if (resonant(*omega.model(), key.mode, trunc.eps_res)) r.add_term(key.mode, key.idx, c);
  r.set_real_flag(omega.real_flagged());
  return r;
}

CohomologyBasis kunneth_basis(const CohomologyBasis& a, const CohomologyBasis& b) {
  if (!a.finite_dimensional || !b.finite_dimensional)
    throw std::invalid_argument("kunneth_basis: both factors must be finite dimensional");
  ModelPtr prod = FoliatedTorusModel::product(a.model, b.model);
  const int na = a.model->ambient_dim();
  const int pa = a.model->leaf_dim();
  const int p = prod->leaf_dim();

  auto embed = [&](const TangentialForm& f, bool first) {
    TangentialForm out(prod, f.degree());
    for (const auto& [key, c] : f.terms()) {
      LatticeMode m(prod->ambient_dim());
      for (int i = 0; i < key.mode.dim; ++i) m[first ? i : na + i] = key.mode[i];
      IndexSet I = first ? key.idx : IndexSet(key.idx.bits << pa);
      out.add_term(m, I, c);
    }
    out.set_real_flag(f.real_flagged());
    return out;
  };

  CohomologyBasis out;
  out.model = prod;
  out.truncation = a.truncation;
  out.finite_dimensional = true;
  out.resonant_modes.push_back(LatticeMode::zero(prod->ambient_dim()));

  for (int kappa = 0; kappa <= p; ++kappa) {
    CohomologyLevel level;
    level.degree = kappa;
    for (int ka = 0; ka <= std::min(kappa, pa); ++ka) {
      int kb = kappa - ka;
      if (kb > b.model->leaf_dim()) continue;
      for (const auto& ra : a.level(ka).reps)
        for (const auto& rb : b.level(kb).reps)
          level.reps.push_back(wedge(embed(ra, true), embed(rb, false)));
    }
    const int dim = static_cast<int>(level.reps.size());
    level.gram = Eigen::MatrixXd(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        level.gram(i, j) = l2_inner(level.reps[static_cast<std::size_t>(i)],
                                    level.reps[static_cast<std::size_t>(j)]);
    out.levels.push_back(std::move(level));
  }
  return out;
}

DualityPairing duality_pairing_matrix(const CohomologyBasis& basis, int kappa) {
  if (!basis.finite_dimensional)
    throw std::invalid_argument("duality_pairing_matrix: basis is truncation limited");
  const int p = basis.model->leaf_dim();
  if (kappa < 0 || kappa > p) throw std::invalid_argument("duality_pairing_matrix: bad degree");
  const auto& low = basis.level(kappa);
  const auto& high = basis.level(p - kappa);
  DualityPairing out;
  out.matrix = Eigen::MatrixXd(static_cast<int>(high.reps.size()),
                               static_cast<int>(low.reps.size()));
  for (int i = 0; i < out.matrix.rows(); ++i)
    for (int j = 0; j < out.matrix.cols(); ++j)
      out.matrix(i, j) = integrate_volq(
          wedge(high.reps[static_cast<std::size_t>(i)], low.reps[static_cast<std::size_t>(j)]));
  out.determinant =
      (out.matrix.rows() == out.matrix.cols() && out.matrix.rows() > 0)
          ? out.matrix.determinant()
          : 0.0;
  out.invertible = std::abs(out.determinant) > 1e-8;
  return out;
}

namespace {

// columns of L^{-T} express the Gram-orthonormalized representatives in the
// raw basis
Eigen::MatrixXd orthonormalizer(const Eigen::MatrixXd& gram) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cohomology basis Gram matrix is not positive definite");
  Eigen::MatrixXd l = llt.matrixL();
  return l.transpose()
      .triangularView<Eigen::Upper>()
      .solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

}  // namespace

Eigen::MatrixXd pullback_matrix_on_cohomology(const AffineFoliatedMap& f,
                                              const CohomologyBasis& basis, int kappa) {
  if (!basis.finite_dimensional)
    throw std::invalid_argument("pullback_matrix_on_cohomology: basis is truncation limited");
  const auto& level = basis.level(kappa);
  const int dim = static_cast<int>(level.reps.size());
  if (dim == 0) return Eigen::MatrixXd(0, 0);

  Eigen::MatrixXd t = orthonormalizer(level.gram);  // reps_ortho = reps * t

  // raw cross inner products <r_i, f* r_j>
  Eigen::MatrixXd cross(dim, dim);
  for (int j = 0; j < dim; ++j) {
    TangentialForm pb = pullback(f, level.reps[static_cast<std::size_t>(j)]);
    for (const auto& [key, c] : pb.terms())
      if (key.mode.sup_norm() > basis.truncation.m_max)
        throw TruncationError("pullback leaves the truncation box");
    TangentialForm projected = hodge_project(pb, basis.truncation);
    for (int i = 0; i < dim; ++i)
      cross(i, j) = l2_inner(level.reps[static_cast<std::size_t>(i)], projected);
  }
  return t.transpose() * cross * t;
}

double alternating_trace(const AffineFoliatedMap& f, const CohomologyBasis& basis) {
  double acc = 0.0;
  for (int kappa = 0; kappa <= basis.model->leaf_dim(); ++kappa) {
    double tr = pullback_matrix_on_cohomology(f, basis, kappa).trace();
    acc += (kappa % 2 == 0) ? tr : -tr;
  }
  return acc;
}

}  // namespace leafcalc
