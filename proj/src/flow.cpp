#include "leafcalc/flow.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <map>
#include <stdexcept>

namespace leafcalc {

Flow Flow::affine(ModelPtr model, const Eigen::VectorXd& velocity, double cocycle_rate) {
  Flow f;
  f.variant_ = Variant::kAffine;
  f.model_ = std::move(model);
  f.velocity_ = velocity;
  if (velocity.size() != f.model_->ambient_dim())
    throw std::invalid_argument("affine flow: velocity dimension mismatch");
  f.cocycle_.rate = cocycle_rate;
  return f;
}

Flow Flow::vector_field(FoliatedVectorField field, Rk4Settings settings, double cocycle_rate) {
  if (!field.foliated())
    throw std::invalid_argument("vector-field flow: generator must be foliated");
  if (!(settings.step > 0))
    throw std::invalid_argument("vector-field flow: integrator step must be positive");
  Flow f;
  f.variant_ = Variant::kVectorField;
  f.model_ = field.model();
  f.field_.emplace(std::move(field));
  f.settings_ = settings;
  f.cocycle_.rate = cocycle_rate;
  return f;
}

Flow Flow::suspension(SuspensionModel model, double cocycle_rate) {
  Flow f;
  f.variant_ = Variant::kSuspension;
  f.suspension_.emplace(std::move(model));
  f.cocycle_.rate = cocycle_rate;
  return f;
}

const ModelPtr& Flow::torus_model() const {
  if (!model_) throw std::logic_error("flow: no torus model for this variant");
  return model_;
}

const SuspensionModel& Flow::suspension_model() const {
  if (!suspension_) throw std::logic_error("flow: not a suspension flow");
  return *suspension_;
}

const FoliatedVectorField& Flow::field() const {
  if (!field_) throw std::logic_error("flow: not a vector-field flow");
  return *field_;
}

const Eigen::VectorXd& Flow::velocity() const {
  if (variant_ != Variant::kAffine) throw std::logic_error("flow: not an affine flow");
  return velocity_;
}

AffineFoliatedMap Flow::time_map(double t) const {
  if (variant_ != Variant::kAffine)
    throw std::logic_error("flow: time map is affine only for translation flows");
  return AffineFoliatedMap::translation(model_, t * velocity_);
}

namespace {

// one RK4 step of the joint (position, variational) system
void rk4_step(const FoliatedVectorField& field, Eigen::VectorXd& x, Eigen::MatrixXd* v,
              double h) {
  auto fx = [&](const Eigen::VectorXd& p) { return field.evaluate(p); };
  Eigen::VectorXd k1 = fx(x);
  Eigen::VectorXd k2 = fx(x + 0.5 * h * k1);
  Eigen::VectorXd k3 = fx(x + 0.5 * h * k2);
  Eigen::VectorXd k4 = fx(x + h * k3);
  if (v) {
    const Eigen::MatrixXd& vv = *v;
    Eigen::MatrixXd m1 = field.jacobian(x) * vv;
    Eigen::MatrixXd m2 = field.jacobian(x + 0.5 * h * k1) * (vv + 0.5 * h * m1);
    Eigen::MatrixXd m3 = field.jacobian(x + 0.5 * h * k2) * (vv + 0.5 * h * m2);
    Eigen::MatrixXd m4 = field.jacobian(x + h * k3) * (vv + h * m3);
    *v += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
  }
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!x.allFinite()) throw std::runtime_error("flow integrator produced non-finite values");
}

void integrate(const FoliatedVectorField& field, Eigen::VectorXd& x, Eigen::MatrixXd* v,
               double t, double step) {
  if (t == 0.0) return;
  const double h = (t > 0) ? step : -step;
  const std::int64_t full = static_cast<std::int64_t>(std::floor(std::abs(t) / step));
  for (std::int64_t i = 0; i < full; ++i) rk4_step(field, x, v, h);
  double rem = std::abs(t) - static_cast<double>(full) * step;
  if (rem > 1e-15) rk4_step(field, x, v, (t > 0) ? rem : -rem);
}

IntMatrix integer_inverse(const IntMatrix& a) {
  Eigen::MatrixXd inv = a.cast<double>().inverse();
  IntMatrix r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = std::llround(inv(i, j));
  if ((a * r - IntMatrix::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() != 0)
    throw std::runtime_error("monodromy is not unimodular");
  return r;
}

}  // namespace

Eigen::VectorXd flow_map(const Flow& flow, double t, const Eigen::VectorXd& x) {
  switch (flow.variant()) {
    case Flow::Variant::kAffine:
      return torus_wrap(x + t * flow.velocity());
    case Flow::Variant::kVectorField: {
      Eigen::VectorXd y = x;
      integrate(flow.field(), y, nullptr, t, flow.settings().step);
      return torus_wrap(y);
    }
    case Flow::Variant::kSuspension:
      throw std::invalid_argument("flow_map: suspension flows act on SuspensionPoint");
  }
  throw std::logic_error("flow_map: unknown variant");
}

SuspensionPoint flow_map(const Flow& flow, double t, const SuspensionPoint& pt) {
  const auto& sus = flow.suspension_model();
  double base = pt.base + t;
  double wraps = std::floor(base);
  auto k = static_cast<std::int64_t>(wraps);
  SuspensionPoint out;
  out.base = base - wraps;
  IntMatrix a = sus.monodromy();
  IntMatrix power = IntMatrix::Identity(sus.fiber_dim(), sus.fiber_dim());
  IntMatrix step = (k >= 0) ? a : integer_inverse(a);
  for (std::int64_t i = 0; i < std::abs(k); ++i) power = power * step;
  out.fiber = torus_wrap(power.cast<double>() * pt.fiber);
  return out;
}

FlowState initial_state(const Flow& flow, const Eigen::VectorXd& x) {
  const int n = flow.torus_model()->ambient_dim();
  return FlowState{x, Eigen::MatrixXd::Identity(n, n)};
}

void advance(const Flow& flow, FlowState& state, double dt) {
  switch (flow.variant()) {
    case Flow::Variant::kAffine:
      state.x += dt * flow.velocity();
      return;  // derivative stays the identity
    case Flow::Variant::kVectorField:
      integrate(flow.field(), state.x, &state.v, dt, flow.settings().step);
      return;
    case Flow::Variant::kSuspension:
      throw std::invalid_argument("advance: suspension flows are handled exactly");
  }
}

LinearizationBlocks linearize_at(const Flow& flow, double t, const Eigen::VectorXd& point) {
  switch (flow.variant()) {
    case Flow::Variant::kAffine: {
      const auto& m = *flow.torus_model();
      return {Eigen::MatrixXd::Identity(m.leaf_dim(), m.leaf_dim()),
              Eigen::MatrixXd::Identity(m.transverse_dim(), m.transverse_dim())};
    }
    case Flow::Variant::kVectorField: {
      const auto& m = *flow.torus_model();
      FlowState st = initial_state(flow, point);
      advance(flow, st, t);
      return {m.tangential_frame().transpose() * st.v * m.tangential_frame(),
              m.transverse_frame().transpose() * st.v * m.transverse_frame()};
    }
    case Flow::Variant::kSuspension: {
      const auto& sus = flow.suspension_model();
      double rounded = std::round(t);
      if (std::abs(t - rounded) > 1e-9)
        throw std::invalid_argument("suspension linearization: integer return times only");
      LinearizationBlocks b;
      b.tangential = sus.monodromy_power(static_cast<int>(rounded)).cast<double>();
      b.transverse = Eigen::MatrixXd::Identity(1, 1);
      return b;
    }
  }
  throw std::logic_error("linearize_at: unknown variant");
}

std::vector<FixedPointRecord> fixed_points(const Flow& flow, double t, int seed_grid_per_axis,
                                           FixedPointSearchStats* stats) {
  if (!(t > 0)) throw std::invalid_argument("fixed_points: positive time expected");
  std::vector<FixedPointRecord> out;
  switch (flow.variant()) {
    case Flow::Variant::kSuspension:
      return out;  // unit transverse speed, no rest points
    case Flow::Variant::kAffine: {
      if (flow.velocity().cwiseAbs().maxCoeff() < 1e-12)
        throw std::invalid_argument(
            "fixed_points: affine flow with zero velocity fixes the whole torus");
      return out;
    }
    case Flow::Variant::kVectorField:
      break;
  }

  const auto& field = flow.field();
  const auto& model = *flow.torus_model();
  const int n = model.ambient_dim();

  std::vector<Eigen::VectorXd> found;
  std::int64_t seeds = 1;
  for (int i = 0; i < n; ++i) seeds *= seed_grid_per_axis;
  if (stats) stats->seeds = static_cast<int>(seeds);
  for (std::int64_t flat = 0; flat < seeds; ++flat) {
    Eigen::VectorXd x(n);
    std::int64_t rest = flat;
    for (int i = 0; i < n; ++i) {
      x(i) = static_cast<double>(rest % seed_grid_per_axis) / seed_grid_per_axis;
      rest /= seed_grid_per_axis;
    }
    bool converged = false;
    for (int iter = 0; iter < 50; ++iter) {
      Eigen::VectorXd fx = field.evaluate(x);
      if (fx.cwiseAbs().maxCoeff() < 1e-12) {
        converged = true;
        break;
      }
      Eigen::MatrixXd j = field.jacobian(x);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
      if (!lu.isInvertible()) break;
      Eigen::VectorXd delta = lu.solve(fx);
      if (delta.cwiseAbs().maxCoeff() > 0.25) delta *= 0.25 / delta.cwiseAbs().maxCoeff();
      x -= delta;
    }
    if (!converged) continue;
    if (stats) ++stats->converged_seeds;
    x = torus_wrap(x);
    bool duplicate = false;
    for (const auto& y : found) {
      double dist = 0.0;
      for (int i = 0; i < n; ++i) {
        double d = std::abs(x(i) - y(i));
        dist = std::max(dist, std::min(d, 1.0 - d));
      }
      if (dist < 1e-6) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) found.push_back(x);
  }

  std::sort(found.begin(), found.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a(i) != b(i)) return a(i) < b(i);
    return false;
  });

  for (const auto& x : found) {
    FixedPointRecord rec;
    rec.location = x;
    rec.residual = field.evaluate(x).cwiseAbs().maxCoeff();
    rec.t_sample = t;
    auto blocks = linearize_at(flow, t, x);
    rec.tangential_block = blocks.tangential;
    rec.transverse_block = blocks.transverse;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PeriodicOrbitRecord> periodic_orbits_suspension(const SuspensionModel& model,
                                                            int nu_max) {
  if (!model.hyperbolic())
    throw std::invalid_argument("periodic_orbits_suspension: monodromy must be hyperbolic");
  const int d = model.fiber_dim();
  std::vector<PeriodicOrbitRecord> out;

  for (int nu = 1; nu <= nu_max; ++nu) {
    IntMatrix m = model.monodromy_power(nu) - IntMatrix::Identity(d, d);
    if (integer_determinant(m) == 0)
      throw std::invalid_argument("periodic_orbits_suspension: degenerate power, not hyperbolic");
    auto sols = solve_lattice_congruence(m);

    // group the fixed points of A^nu into monodromy orbits (exact arithmetic
    // on numerators modulo the common denominator)
    const IntMatrix& a = model.monodromy();
    std::map<std::vector<std::int64_t>, bool> used;
    auto key_of = [&](const RationalPoint& p) {
      std::vector<std::int64_t> k(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = p.num(i);
      return k;
    };
    std::map<std::vector<std::int64_t>, RationalPoint> points;
    for (const auto& p : sols.points) points[key_of(p)] = p;

    for (const auto& [key, start] : points) {
      if (used[key]) continue;
      // walk the orbit
      std::vector<RationalPoint> orbit;
      RationalPoint cur = start;
      while (true) {
        orbit.push_back(cur);
        used[key_of(cur)] = true;
        IntVector next = a * cur.num;
        RationalPoint np;
        np.den = cur.den;
        np.num = IntVector(d);
        for (int i = 0; i < d; ++i) {
          std::int64_t r = next(i) % cur.den;
          np.num(i) = r < 0 ? r + cur.den : r;
        }
        if (key_of(np) == key_of(start)) break;
        cur = np;
      }
      const auto l = static_cast<std::int64_t>(orbit.size());
      if (nu % l != 0)
        throw std::logic_error("orbit length does not divide the enumeration time");
      PeriodicOrbitRecord rec;
      rec.representative = *std::min_element(orbit.begin(), orbit.end());
      rec.least_period = l;
      rec.multiplicity = nu / l;
      rec.tangential_return_map = model.monodromy_power(static_cast<int>(l));
      out.push_back(std::move(rec));
    }
  }
  return out;
}

Eigen::MatrixXd reduced_transverse_map(const Eigen::MatrixXd& transverse_block,
                                       const Eigen::VectorXd& xbar_coords) {
  const int q = static_cast<int>(transverse_block.rows());
  if (xbar_coords.size() != q)
    throw std::invalid_argument("reduced_transverse_map: dimension mismatch");
  double norm = xbar_coords.norm();
  if (norm < 1e-12)
    throw std::invalid_argument(
        "reduced_transverse_map: flow is tangent to the leaves at this point");
  // orthonormal complement of the flow line via Householder QR
  Eigen::MatrixXd m(q, 1);
  m.col(0) = xbar_coords / norm;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd qfull = qr.householderQ();
  Eigen::MatrixXd complement = qfull.rightCols(q - 1);
  return complement.transpose() * transverse_block * complement;
}

Eigen::MatrixXd reduced_transverse_map(const SuspensionModel&, const PeriodicOrbitRecord&) {
  return Eigen::MatrixXd(0, 0);
}

TransversalityReport transversality_fixed_point(const Flow& flow, const FixedPointRecord& rec,
                                                const std::vector<double>& t_samples) {
  TransversalityReport rep;
  rep.min_abs_det_tangential = std::numeric_limits<double>::infinity();
  rep.min_abs_det_transverse = std::numeric_limits<double>::infinity();
  for (double t : t_samples) {
    auto blocks = linearize_at(flow, t, rec.location);
    const int p = static_cast<int>(blocks.tangential.rows());
    const int q = static_cast<int>(blocks.transverse.rows());
    double det_f = (Eigen::MatrixXd::Identity(p, p) - blocks.tangential).determinant();
    double det_q =
        (q == 0) ? 1.0 : (Eigen::MatrixXd::Identity(q, q) - blocks.transverse).determinant();
    rep.min_abs_det_tangential = std::min(rep.min_abs_det_tangential, std::abs(det_f));
    rep.min_abs_det_transverse = std::min(rep.min_abs_det_transverse, std::abs(det_q));
    rep.tangential_signs.push_back(det_f > 0 ? 1 : -1);
  }
  for (std::size_t i = 1; i < rep.tangential_signs.size(); ++i)
    if (rep.tangential_signs[i] != rep.tangential_signs[0]) rep.sign_stable = false;
  rep.transversal =
      rep.min_abs_det_tangential > 1e-10 && rep.min_abs_det_transverse > 1e-10;
  return rep;
}

TransversalityReport transversality_orbit(const SuspensionModel& model,
                                          const PeriodicOrbitRecord& rec) {
  TransversalityReport rep;
  const int d = model.fiber_dim();
  IntMatrix ret = IntMatrix::Identity(d, d);
  for (int i = 0; i < rec.multiplicity; ++i) ret = ret * rec.tangential_return_map;
  std::int64_t det_f = integer_determinant(IntMatrix::Identity(d, d) - ret);
  rep.min_abs_det_tangential = static_cast<double>(std::abs(det_f));
  rep.min_abs_det_transverse = 1.0;  // empty reduced transverse space
  rep.tangential_signs.push_back(det_f > 0 ? 1 : -1);
  rep.transversal = det_f != 0;
  return rep;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

nlohmann::json record_to_json(const FixedPointRecord& rec, const TransversalityReport& trans) {
  nlohmann::json j;
  nlohmann::json loc = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rec.location.size(); ++i) loc.push_back(rec.location(i));
  j["kind"] = "fixed_point";
  j["location"] = loc;
  j["t_sample"] = rec.t_sample;
  j["residual"] = rec.residual;
  j["tangential_block"] = matrix_to_json(rec.tangential_block);
  j["transverse_block"] = matrix_to_json(rec.transverse_block);
  const int p = static_cast<int>(rec.tangential_block.rows());
  const int q = static_cast<int>(rec.transverse_block.rows());
  j["det_id_minus_tangential"] =
      small_determinant(Eigen::MatrixXd::Identity(p, p) - rec.tangential_block);
  j["det_id_minus_transverse"] =
      (q == 0) ? 1.0
               : small_determinant(Eigen::MatrixXd::Identity(q, q) - rec.transverse_block);
  j["transversal"] = trans.transversal;
  j["sign_stable"] = trans.sign_stable;
  return j;
}

nlohmann::json record_to_json(const PeriodicOrbitRecord& rec, const TransversalityReport& trans) {
  nlohmann::json j;
  nlohmann::json num = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rec.representative.num.size(); ++i)
    num.push_back(rec.representative.num(i));
  j["kind"] = "periodic_orbit";
  j["representative"] = {{"numerators", num}, {"denominator", rec.representative.den}};
  j["least_period"] = rec.least_period;
  j["multiplicity"] = rec.multiplicity;
  nlohmann::json ret = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rec.tangential_return_map.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < rec.tangential_return_map.cols(); ++k)
      row.push_back(rec.tangential_return_map(i, k));
    ret.push_back(row);
  }
  j["tangential_return_map"] = ret;
  j["det_id_minus_tangential"] =
      (trans.tangential_signs.empty() ? 0.0 : trans.min_abs_det_tangential *
                                                  trans.tangential_signs.front());
  j["det_id_minus_reduced_transverse"] = 1.0;  // empty quotient block
  j["transversal"] = trans.transversal;
  return j;
}

std::optional<double> affine_periodic_time(const Eigen::VectorXd& velocity, int max_k,
                                           double tol) {
  int imax = 0;
  double vmax = 0.0;
  for (Eigen::Index i = 0; i < velocity.size(); ++i)
    if (std::abs(velocity(i)) > vmax) {
      vmax = std::abs(velocity(i));
      imax = static_cast<int>(i);
    }
  if (vmax < tol) return std::nullopt;  // zero velocity handled upstream
  for (int k = 1; k <= max_k; ++k) {
    double t = static_cast<double>(k) / std::abs(velocity(imax));
    bool integral = true;
    for (Eigen::Index i = 0; i < velocity.size(); ++i) {
      double w = t * velocity(i);
      if (std::abs(w - std::round(w)) > tol) {
        integral = false;
        break;
      }
    }
    if (integral) return t;
  }
  return std::nullopt;
}

}  // namespace leafcalc
