#include "leafcalc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "leafcalc/lefschetz.hpp"
#include "leafcalc/regularize.hpp"

namespace leafcalc {

namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

nlohmann::json kronecker_model_json(double slope) {
  nlohmann::json j;
  j["type"] = "torus";
  j["ambient"] = 2;
  j["tangential"] = {{1.0, slope}};
  j["orientation"] = 1;
  return j;
}

nlohmann::json one_leaf_json(int n) {
  nlohmann::json j;
  j["type"] = "torus";
  j["ambient"] = n;
  nlohmann::json dirs = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < n; ++k) row.push_back(i == k ? 1.0 : 0.0);
    dirs.push_back(row);
  }
  j["tangential"] = dirs;
  j["orientation"] = 1;
  return j;
}

nlohmann::json cat_suspension_json() {
  nlohmann::json j;
  j["type"] = "suspension";
  j["ambient"] = 3;
  j["monodromy"] = {{2, 1}, {1, 1}};
  return j;
}

ModelPtr torus_model_from(const nlohmann::json& j) { return FoliatedTorusModel::from_json(j); }

Flow flow_from(const nlohmann::json& model_json, const nlohmann::json& flow_json) {
  std::string variant = flow_json.at("variant").get<std::string>();
  double rate = flow_json.value("cocycle_rate", 0.0);
  if (variant == "affine") {
    auto model = torus_model_from(model_json);
    Eigen::VectorXd v(model->ambient_dim());
    int i = 0;
    for (const auto& x : flow_json.at("velocity")) v(i++) = x.get<double>();
    if (flow_json.value("velocity_along_leaf", false)) v = model->tangential_frame() * v;
    return Flow::affine(model, v, rate);
  }
  if (variant == "vector_field") {
    auto model = torus_model_from(model_json);
    std::string preset = flow_json.value("preset", "");
    Rk4Settings settings{flow_json.value("step", 1e-3)};
    if (preset == "morse")
      return Flow::vector_field(FoliatedVectorField::morse(model), settings, rate);
    // explicit Fourier components, one term list per ambient coordinate
    std::vector<TangentialForm> comps;
    for (const auto& comp : flow_json.at("components")) {
      TangentialForm f(model, 0);
      for (const auto& term : comp) {
        LatticeMode m(model->ambient_dim());
        int i = 0;
        for (const auto& v : term.at("mode")) m[i++] = v.get<std::int64_t>();
        f.add_term(m, IndexSet::empty(),
                   Complex(term.at("re").get<double>(), term.value("im", 0.0)));
      }
      f.set_real_flag(f.check_reality());
      comps.push_back(std::move(f));
    }
    return Flow::vector_field(FoliatedVectorField(model, std::move(comps)), settings, rate);
  }
  if (variant == "suspension")
    return Flow::suspension(SuspensionModel::from_json(model_json), rate);
  throw std::invalid_argument("flow config: unknown variant " + variant);
}

std::string worst_status(const std::vector<CheckResult>& checks) {
  bool any_fail = false, any_partial = false;
  for (const auto& c : checks) {
    if (c.status == "FAIL") any_fail = true;
    if (c.status == "PARTIAL") any_partial = true;
  }
  if (any_fail) return "FAIL";
  if (any_partial) return "PARTIAL";
  return "PASS";
}

// ---------------------------------------------------------------------------
// individual checks
// ---------------------------------------------------------------------------

CheckResult check_exterior_laws(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "exterior_laws";
  std::mt19937_64 rng(cfg.seed);

  Eigen::VectorXd kron_dir(2);
  kron_dir << 1.0, kGolden;
  Eigen::VectorXd t3_dir(3);
  t3_dir << 1.0, 0.0, 0.0;
  std::vector<ModelPtr> models{FoliatedTorusModel::from_directions(2, {kron_dir}),
                               FoliatedTorusModel::one_leaf(2),
                               FoliatedTorusModel::from_directions(3, {t3_dir})};

  const int forms_total = cfg.params.value("random_forms", 100);
  double dd_dev = 0.0, leibniz_dev = 0.0, star_dev = 0.0, adj_dev = 0.0;
  int produced = 0;
  while (produced < forms_total) {
    for (const auto& m : models) {
      if (produced >= forms_total) break;
      const int p = m->leaf_dim();
      int deg = static_cast<int>(rng() % static_cast<std::uint64_t>(p + 1));
      auto f = random_real_form(m, deg, 5, 3, rng);
      ++produced;

      dd_dev = std::max(dd_dev,
                        exterior_derivative(exterior_derivative(f)).max_coefficient_magnitude());

      if (deg + 1 <= p) {
        int max_g = p - 1 - deg;
        int deg_g = static_cast<int>(rng() % static_cast<std::uint64_t>(max_g + 1));
        auto g = random_real_form(m, deg_g, 4, 3, rng);
        auto lhs = exterior_derivative(wedge(f, g));
        auto rhs = wedge(exterior_derivative(f), g) +
                   wedge(f, exterior_derivative(g)) * (deg % 2 == 0 ? 1.0 : -1.0);
        leibniz_dev = std::max(leibniz_dev, (lhs - rhs).max_coefficient_magnitude());
      }

      double sign = ((deg * (p - deg)) % 2 == 0) ? 1.0 : -1.0;
      star_dev = std::max(star_dev,
                          (hodge_star(hodge_star(f)) - f * sign).max_coefficient_magnitude());

      if (deg + 1 <= p) {
        auto beta = random_real_form(m, deg + 1, 4, 3, rng);
        double lhs = l2_inner(exterior_derivative(f), beta);
        double rhs = l2_inner(f, codifferential(beta));
        adj_dev = std::max(adj_dev, std::abs(lhs - rhs) /
                                        std::max({1.0, std::abs(lhs), std::abs(rhs)}));
      }
    }
  }

  r.computed = {{"d_squared_max", dd_dev},
                {"leibniz_max", leibniz_dev},
                {"star_involution_max", star_dev},
                {"adjointness_rel_max", adj_dev},
                {"forms", produced}};
  r.oracle = {{"d_squared_max", 1e-12},
              {"leibniz_max", 1e-12},
              {"star_involution_max", 1e-10},
              {"adjointness_rel_max", 1e-10}};
  r.max_deviation = std::max({dd_dev, leibniz_dev, star_dev, adj_dev});
  bool pass = dd_dev < 1e-12 && leibniz_dev < 1e-12 && star_dev < 1e-10 && adj_dev < 1e-10;
  r.status = pass ? "PASS" : "FAIL";
  return r;
}

CheckResult check_harmonic_dimensions(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "harmonic_dimensions";
  auto model = torus_model_from(cfg.model);
  auto basis = harmonic_basis(model, cfg.truncation);
  auto dims = basis.dimensions();
  auto expected = cfg.params.at("expected_dimensions").get<std::vector<int>>();
  bool expect_finite = cfg.params.value("expect_finite", true);

  r.computed = basis.report();
  r.oracle = {{"dimensions", expected}, {"finite_dimensional", expect_finite}};
  bool pass = dims == expected && basis.finite_dimensional == expect_finite;
  r.status = pass ? "PASS" : "FAIL";
  return r;
}

CheckResult check_kunneth(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "kunneth";
  double slope_a = cfg.params.value("slope_a", kGolden);
  double slope_b = cfg.params.value("slope_b", std::sqrt(2.0));
  auto basis_a = harmonic_basis(torus_model_from(kronecker_model_json(slope_a)), cfg.truncation);
  auto basis_b = harmonic_basis(torus_model_from(kronecker_model_json(slope_b)), cfg.truncation);
  auto product = kunneth_basis(basis_a, basis_b);

  // convolution of the factor dimension vectors
  auto da = basis_a.dimensions();
  auto db = basis_b.dimensions();
  std::vector<int> convolution(da.size() + db.size() - 1, 0);
  for (std::size_t i = 0; i < da.size(); ++i)
    for (std::size_t j = 0; j < db.size(); ++j)
      convolution[i + j] += da[i] * db[j];

  // independent scan of the product model
  int direct_m_max = cfg.params.value("direct_m_max", 20);
  auto direct = harmonic_basis(product.model, SpectralTruncation{direct_m_max, cfg.truncation.eps_res});

  r.computed = {{"kunneth_dimensions", product.dimensions()},
                {"direct_scan_dimensions", direct.dimensions()}};
  r.oracle = {{"convolution", convolution}};
  bool pass = product.dimensions() == convolution && direct.dimensions() == convolution &&
              direct.finite_dimensional;
  r.status = pass ? "PASS" : "FAIL";
  return r;
}

CheckResult check_duality(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "duality";
  auto model = torus_model_from(cfg.model);
  auto basis = harmonic_basis(model, cfg.truncation);
  nlohmann::json dets = nlohmann::json::array();
  bool pass = basis.finite_dimensional;
  double min_abs = std::numeric_limits<double>::infinity();
  for (int kappa = 0; kappa <= model->leaf_dim(); ++kappa) {
    auto d = duality_pairing_matrix(basis, kappa);
    dets.push_back(d.determinant);
    min_abs = std::min(min_abs, std::abs(d.determinant));
    pass = pass && d.invertible;
  }
  r.computed = {{"determinants", dets}, {"min_abs_det", min_abs}};
  r.oracle = {{"min_abs_det_threshold", 1e-8}};
  r.status = pass ? "PASS" : "FAIL";
  return r;
}

CheckResult check_classical_lefschetz(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "classical_lefschetz";
  auto model = torus_model_from(cfg.model);
  auto basis = harmonic_basis(model, cfg.truncation);

  IntMatrix a(model->ambient_dim(), model->ambient_dim());
  const auto& rows = cfg.params.at("matrix");
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = rows.at(i).at(j).get<std::int64_t>();

  auto f = AffineFoliatedMap::linear(model, a);
  auto rep1 = classical_lefschetz_check(f, basis);
  auto rep2 = classical_lefschetz_check(compose(f, f), basis);

  auto expected = cfg.params.at("expected").get<std::vector<double>>();
  r.computed = {{"map", rep1.to_json()}, {"map_squared", rep2.to_json()}};
  r.oracle = {{"expected", expected}};
  bool pass = rep1.pass && rep2.pass && rep1.left == expected.at(0) && rep2.left == expected.at(1);
  r.status = pass ? "PASS" : "FAIL";
  return r;
}

CheckResult check_suspension_atoms(const ScenarioConfig& cfg, ReportDocument& doc) {
  CheckResult r;
  r.name = "suspension_atoms";
  Flow flow = flow_from(cfg.model, cfg.flow);
  const auto& sus = flow.suspension_model();
  if (sus.fiber_dim() != 2)
    throw std::invalid_argument("suspension_atoms: recursion oracle covers 2x2 monodromies");

  auto lef = assemble_lefschetz_distribution(flow, cfg.t_max, cfg.t_samples);
  doc.distribution = lef.distribution;

  // oracle: traces by the characteristic-polynomial recursion
  //   t_{nu+1} = (tr A) t_nu - (det A) t_{nu-1}
  // so det(id - A^nu) = 1 - t_nu + (det A)^nu, never touching the lattice
  // enumeration path
  std::int64_t tr_a = sus.monodromy().trace();
  std::int64_t det_a = integer_determinant(sus.monodromy());
  const int nu_max = static_cast<int>(std::floor(cfg.t_max + 1e-9));
  std::vector<double> oracle;
  std::int64_t prev = 2, cur = tr_a, det_pow = det_a;
  for (int nu = 1; nu <= nu_max; ++nu) {
    if (nu > 1) {
      std::int64_t next = tr_a * cur - det_a * prev;
      prev = cur;
      cur = next;
      det_pow *= det_a;
    } else {
      det_pow = det_a;
    }
    double weight = static_cast<double>(1 - cur + det_pow) * flow.cocycle().trace(nu);
    oracle.push_back(weight);
  }

  nlohmann::json atoms = nlohmann::json::array();
  bool pass = lef.distribution.atoms().size() == oracle.size();
  for (std::size_t i = 0; i < lef.distribution.atoms().size() && pass; ++i) {
    const auto& a = lef.distribution.atoms()[i];
    atoms.push_back({{"t", a.t}, {"w", a.weight}});
    if (a.weight != oracle[i]) pass = false;
  }
  if (atoms.empty())
    for (const auto& a : lef.distribution.atoms()) atoms.push_back({{"t", a.t}, {"w", a.weight}});

  // orbit counts per least period from the contribution list
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& c : lef.contributions)
    if (c.multiplicity == 1) {
      std::string key = std::to_string(static_cast<int>(c.least_period));
      counts[key] = counts.value(key, 0) + 1;
    }

  // per-record report entries
  nlohmann::json records = nlohmann::json::array();
  const int nu_max2 = static_cast<int>(std::floor(cfg.t_max + 1e-9));
  for (const auto& rec : periodic_orbits_suspension(sus, nu_max2))
    records.push_back(record_to_json(rec, transversality_orbit(sus, rec)));

  r.computed = {{"atoms", atoms},
                {"orbit_counts_by_least_period", counts},
                {"records", records}};
  r.oracle = {{"weights", oracle}};
  r.status = pass ? "PASS" : "FAIL";
  return r;
}

CheckResult check_dynamical_lefschetz(const ScenarioConfig& cfg, ReportDocument& doc) {
  CheckResult r;
  r.name = "dynamical_lefschetz";

  Flow flow = flow_from(cfg.model, cfg.flow);
  std::optional<CohomologyBasis> basis;
  if (flow.variant() != Flow::Variant::kSuspension)
    basis = harmonic_basis(torus_model_from(cfg.model), cfg.truncation);

  auto rep = verify_dynamical_lefschetz(flow, basis ? &*basis : nullptr, cfg.t_max,
                                        cfg.t_samples);
  r.computed = rep.to_json();
  if (flow.variant() == Flow::Variant::kVectorField) {
    FixedPointSearchStats stats;
    double t_a = cfg.t_max / 2.0;
    auto records = fixed_points(flow, t_a, 32, &stats);
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& rec : records)
      recs.push_back(record_to_json(
          rec, transversality_fixed_point(flow, rec, {0.5 * t_a, t_a, 1.5 * t_a})));
    r.computed["fixed_point_records"] = recs;
    r.computed["newton"] = {{"seeds", stats.seeds}, {"converged_seeds", stats.converged_seeds}};
  }
  r.max_deviation = rep.max_smooth_deviation;
  r.oracle = {{"max_smooth_deviation", 1e-6}, {"max_atom_weight", 1e-9}};
  if (rep.mode == VerificationReport::Mode::kFull)
    r.status = rep.pass ? "PASS" : "FAIL";
  else {
    r.status = rep.pass ? "PARTIAL" : "FAIL";
    r.detail = rep.note;
  }

  // keep the assembled distribution for CSV export when available
  try {
    auto lef = assemble_lefschetz_distribution(flow, cfg.t_max, cfg.t_samples);
    doc.distribution = lef.distribution;
  } catch (const HypothesisViolation&) {
  }
  return r;
}

CheckResult check_coincidence_function(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "coincidence_function";
  Flow flow = flow_from(cfg.model, cfg.flow);
  auto basis = harmonic_basis(torus_model_from(cfg.model), cfg.truncation);
  auto grid = DistributionOnRPlus::uniform_grid(cfg.t_max, std::min(cfg.t_samples, 64));
  auto rep = dual_trace_check(flow, basis, grid);
  r.computed = rep.to_json();
  r.max_deviation = rep.max_deviation;
  r.oracle = {{"max_deviation", 1e-9}};
  r.status = rep.pass ? "PASS" : "FAIL";
  return r;
}

CheckResult check_rprime_convergence(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "rprime_convergence";
  auto model = torus_model_from(cfg.model);
  std::mt19937_64 rng(cfg.seed);
  const int resolution = cfg.params.value("resolution", 192);
  const int n_forms = cfg.params.value("random_forms", 5);

  bool monotone = true;
  nlohmann::json errors = nlohmann::json::array();
  for (int trial = 0; trial < n_forms; ++trial) {
    int degree = static_cast<int>(rng() % static_cast<std::uint64_t>(model->leaf_dim() + 1));
    auto f = random_real_form(model, degree, 4, 2, rng);
    if (f.is_zero()) continue;
    auto grid = GridForm::sample(f, resolution);
    double sign = signs::rprime(model->leaf_dim(), degree);
    double prev = std::numeric_limits<double>::infinity();
    nlohmann::json per_nu = nlohmann::json::array();
    for (double nu : cfg.nu_sequence) {
      auto out = smooth_form_rprime(grid, nu);
      double err = (out * sign - grid).max_abs();
      per_nu.push_back({{"nu", nu}, {"sup_error", err}});
      if (err >= prev) monotone = false;
      prev = err;
    }
    errors.push_back(per_nu);
  }
  r.computed = {{"errors", errors}};
  r.oracle = {{"monotone_decrease", true}};
  r.status = monotone ? "PASS" : "FAIL";
  return r;
}

CheckResult check_current_pairing(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "current_pairing";
  auto model = torus_model_from(cfg.model);
  if (model->transverse_dim() != 0 || model->ambient_dim() != 2)
    throw std::invalid_argument("current_pairing: bundled case runs on the one-leaf T^2");

  IntVector e1(2);
  e1 << 1, 0;
  LinearSubtorus circle(model, Eigen::Vector2d(0.0, 0.2), {e1});
  GridCurrent s{SubtorusCurrent{circle}};

  // the dx1 component varies transversally so the smearing bias is exercised
  TangentialForm omega(model, 1);
  LatticeMode zero(2);
  omega.add_term(zero, IndexSet::single(0), Complex(0.7, 0.0));
  LatticeMode m10(2);
  m10[0] = 1;
  omega = omega + wedge(TangentialForm::cosine_mode(model, m10),
                        TangentialForm::frame_form(model, IndexSet::single(0))) *
                      0.3;
  LatticeMode m01(2);
  m01[1] = 1;
  omega = omega + wedge(TangentialForm::cosine_mode(model, m01),
                        TangentialForm::frame_form(model, IndexSet::single(0))) *
                      0.25;
  omega = omega + wedge(TangentialForm::cosine_mode(model, m01),
                        TangentialForm::frame_form(model, IndexSet::single(1))) *
                      0.4;

  const double nu = cfg.params.value("nu", 16.0);
  const int resolution = cfg.params.value("resolution", 256);
  double exact = circle.pair(omega);
  auto rnu = regularize_current(s, nu, resolution);
  GridCurrent full{FormCurrent{TangentialForm::constant(model, Complex(1.0, 0.0))}};
  double paired = pair_current(full, rnu, omega, resolution);
  double sign = signs::parity(model->leaf_dim() * circle.leaf_dim());
  double err = std::abs(paired - sign * exact);

  r.computed = {{"pairing", paired}, {"exact", sign * exact}, {"error", err}};
  r.oracle = {{"tolerance", 1e-2}};
  r.max_deviation = err;
  r.status = err < 1e-2 ? "PASS" : "FAIL";
  return r;
}

CheckResult check_intersection_products(const ScenarioConfig& cfg) {
  CheckResult r;
  r.name = "intersection_products";
  nlohmann::json cases = nlohmann::json::array();
  bool pass = true;

  auto run_case = [&](const std::string& label, const GridCurrent& s, const GridCurrent& t,
                      const TangentialForm& eta, const std::vector<double>& nus, int resolution,
                      int quad) {
    auto seq = intersection_product_numeric(s, t, eta, nus, resolution, quad);
    double closed = intersection_closed_form(s, t, eta);
    double tol = std::max(1e-2, 3.0 * seq.error_estimate);
    bool ok = std::abs(seq.extrapolated - closed) < tol && seq.converged;
    pass = pass && ok;
    nlohmann::json per_nu = nlohmann::json::array();
    for (std::size_t i = 0; i < seq.nu_values.size(); ++i)
      per_nu.push_back({{"nu", seq.nu_values[i]}, {"pairing", seq.pairings[i]}});
    cases.push_back({{"case", label},
                     {"per_nu", per_nu},
                     {"extrapolated", seq.extrapolated},
                     {"error_estimate", seq.error_estimate},
                     {"closed_form", closed},
                     {"status", ok ? "PASS" : "FAIL"}});
  };

  auto t2 = FoliatedTorusModel::one_leaf(2);
  IntVector e1_2(2), e2_2(2);
  e1_2 << 1, 0;
  e2_2 << 0, 1;

  // (1) crossing circles, localized test function
  {
    LinearSubtorus horizontal(t2, Eigen::Vector2d(0, 0), {e1_2});
    LinearSubtorus vertical(t2, Eigen::Vector2d(0, 0), {e2_2});
    auto eta = TangentialForm::constant(t2, Complex(1.0, 0.0));
    for (int i = 0; i < 2; ++i) {
      LatticeMode mi(2);
      mi[i] = 1;
      auto factor = TangentialForm::constant(t2, Complex(0.5, 0.0)) +
                    TangentialForm::cosine_mode(t2, mi) * 0.5;
      eta = wedge(wedge(eta, factor), factor);
    }
    run_case("crossing_circles", GridCurrent{SubtorusCurrent{horizontal}},
             GridCurrent{SubtorusCurrent{vertical}}, eta, cfg.nu_sequence,
             cfg.grid_resolution, 2048);
  }

  // (2) disjoint parallel circles: exactly zero
  {
    LinearSubtorus a(t2, Eigen::Vector2d(0.0, 0.2), {e1_2});
    LinearSubtorus b(t2, Eigen::Vector2d(0.0, 0.7), {e1_2});
    auto eta = TangentialForm::constant(t2, Complex(1.0, 0.0));
    GridCurrent s{SubtorusCurrent{a}}, t{SubtorusCurrent{b}};
    auto seq = intersection_product_numeric(s, t, eta, {4.0, 8.0}, 128, 512);
    bool ok = intersection_closed_form(s, t, eta) == 0.0;
    for (double v : seq.pairings) ok = ok && v == 0.0;
    pass = pass && ok;
    cases.push_back({{"case", "disjoint_circles"},
                     {"extrapolated", seq.extrapolated},
                     {"closed_form", 0.0},
                     {"status", ok ? "PASS" : "FAIL"}});
  }

  // (3) T^3 line foliation, straight and tilted plane pairs
  {
    Eigen::VectorXd dir(3);
    dir << 1.0, 0.0, 0.0;
    auto t3 = FoliatedTorusModel::from_directions(3, {dir});
    IntVector e1(3), e2(3), e3(3), e23(3);
    e1 << 1, 0, 0;
    e2 << 0, 1, 0;
    e3 << 0, 0, 1;
    e23 << 0, 1, 1;
    LinearSubtorus t_plane(t3, Eigen::Vector3d(0, 0, 0), {e1, e3});

    TangentialForm eta(t3, 1);
    LatticeMode zero(3);
    eta.add_term(zero, IndexSet::single(0), Complex(0.5, 0.0));
    LatticeMode m100(3);
    m100[0] = 1;
    eta = eta + wedge(TangentialForm::cosine_mode(t3, m100),
                      TangentialForm::frame_form(t3, IndexSet::single(0))) *
                    0.25;
    LatticeMode m010(3);
    m010[1] = 1;
    eta = eta + wedge(TangentialForm::cosine_mode(t3, m010),
                      TangentialForm::frame_form(t3, IndexSet::single(0))) *
                    0.3;

    std::vector<double> nus{4.0, 8.0, 16.0};
    int res3 = cfg.params.value("t3_resolution", 96);
    LinearSubtorus s_plane(t3, Eigen::Vector3d(0, 0, 0), {e1, e2});
    run_case("t3_straight", GridCurrent{SubtorusCurrent{s_plane}},
             GridCurrent{SubtorusCurrent{t_plane}}, eta, nus, res3, 256);
    LinearSubtorus tilted(t3, Eigen::Vector3d(0, 0, 0), {e1, e23});
    run_case("t3_tilted", GridCurrent{SubtorusCurrent{tilted}},
             GridCurrent{SubtorusCurrent{t_plane}}, eta, nus, res3, 256);
  }

  // (4) form currents multiply to the wedge current
  {
    std::mt19937_64 rng(cfg.seed);
    auto omega = random_real_form(t2, 1, 3, 1, rng);
    auto tau = random_real_form(t2, 1, 3, 1, rng);
    auto eta = TangentialForm::constant(t2, Complex(1.0, 0.0));
    for (int i = 0; i < 2; ++i) {
      LatticeMode mi(2);
      mi[i] = 1;
      auto factor = TangentialForm::constant(t2, Complex(0.5, 0.0)) +
                    TangentialForm::cosine_mode(t2, mi) * 0.5;
      eta = wedge(eta, factor);
    }
    run_case("form_currents", GridCurrent{FormCurrent{omega}}, GridCurrent{FormCurrent{tau}},
             eta, {8.0, 16.0, 32.0}, 128, 128);
  }

  r.computed = {{"cases", cases}};
  r.oracle = {{"tolerance", "max(1e-2, 3x extrapolation error)"}};
  r.status = pass ? "PASS" : "FAIL";
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["model"] = model;
  j["flow"] = flow;
  j["truncation"] = {{"m_max", truncation.m_max}, {"eps_res", truncation.eps_res}};
  j["t_max"] = t_max;
  j["t_samples"] = t_samples;
  j["nu_sequence"] = nu_sequence;
  j["grid_resolution"] = grid_resolution;
  j["quad_per_axis"] = quad_per_axis;
  j["seed"] = seed;
  j["checks"] = checks;
  j["params"] = params;
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  c.name = j.at("name").get<std::string>();
  c.model = j.value("model", nlohmann::json::object());
  c.flow = j.value("flow", nlohmann::json::object());
  if (j.contains("truncation")) {
    c.truncation.m_max = j["truncation"].value("m_max", 50);
    c.truncation.eps_res = j["truncation"].value("eps_res", 1e-9);
  }
  c.t_max = j.value("t_max", 5.0);
  c.t_samples = j.value("t_samples", 512);
  if (j.contains("nu_sequence")) c.nu_sequence = j["nu_sequence"].get<std::vector<double>>();
  c.grid_resolution = j.value("grid_resolution", 256);
  c.quad_per_axis = j.value("quad_per_axis", 256);
  c.seed = j.value("seed", static_cast<std::uint64_t>(2024));
  c.checks = j.value("checks", std::vector<std::string>{});
  c.params = j.value("params", nlohmann::json::object());
  c.validate();
  return c;
}

void ScenarioConfig::validate() const {
  const auto& known = known_checks();
  for (const auto& c : checks)
    if (std::find(known.begin(), known.end(), c) == known.end())
      throw std::invalid_argument("scenario config: unknown check '" + c + "'");
  if (checks.empty()) throw std::invalid_argument("scenario config: no checks requested");
  for (std::size_t i = 0; i < checks.size(); ++i)
    for (std::size_t j = i + 1; j < checks.size(); ++j)
      if (checks[i] == checks[j])
        throw std::invalid_argument("scenario config: check '" + checks[i] + "' listed twice");
  if (!(t_max > 0) || t_samples < 2 || grid_resolution < 2 || quad_per_axis < 2 ||
      truncation.m_max < 1 || !(truncation.eps_res > 0))
    throw std::invalid_argument("scenario config: numeric parameters must be positive");
  for (double nu : nu_sequence)
    if (!(nu >= 2.0)) throw std::invalid_argument("scenario config: nu values must be >= 2");
}

nlohmann::json CheckResult::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["status"] = status;
  j["computed"] = computed;
  j["oracle"] = oracle;
  j["max_deviation"] = max_deviation;
  j["detail"] = detail;
  return j;
}

nlohmann::json ReportDocument::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["environment"] = environment;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) list.push_back(c.to_json());
  j["checks"] = list;
  j["status"] = status;
  if (distribution) j["distribution"] = distribution->to_json();
  return j;
}

int ReportDocument::exit_code() const {
  if (status == "FAIL") return 1;
  if (status == "PARTIAL") return 3;
  return 0;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{
      "exterior_laws",        "harmonic_dimensions",  "kunneth",
      "duality",              "classical_lefschetz",  "suspension_atoms",
      "dynamical_lefschetz",  "coincidence_function", "rprime_convergence",
      "current_pairing",      "intersection_products"};
  return names;
}

ReportDocument run_scenario(const ScenarioConfig& config) {
  config.validate();
  ReportDocument doc;
  doc.scenario = config.name;
  doc.environment = {{"version", kVersion},
                     {"truncation",
                      {{"m_max", config.truncation.m_max}, {"eps_res", config.truncation.eps_res}}},
                     {"seed", config.seed}};

  for (const auto& name : config.checks) {
    CheckResult result;
    try {
      if (name == "exterior_laws") result = check_exterior_laws(config);
      else if (name == "harmonic_dimensions") result = check_harmonic_dimensions(config);
      else if (name == "kunneth") result = check_kunneth(config);
      else if (name == "duality") result = check_duality(config);
      else if (name == "classical_lefschetz") result = check_classical_lefschetz(config);
      else if (name == "suspension_atoms") result = check_suspension_atoms(config, doc);
      else if (name == "dynamical_lefschetz") result = check_dynamical_lefschetz(config, doc);
      else if (name == "coincidence_function") result = check_coincidence_function(config);
      else if (name == "rprime_convergence") result = check_rprime_convergence(config);
      else if (name == "current_pairing") result = check_current_pairing(config);
      else if (name == "intersection_products") result = check_intersection_products(config);
      else throw std::invalid_argument("unknown check " + name);
    } catch (const HypothesisViolation& e) {
      result.name = name;
      result.status = "PARTIAL";
      result.detail = e.what();
    }
    doc.checks.push_back(std::move(result));
  }
  doc.status = worst_status(doc.checks);
  return doc;
}

const std::vector<std::string>& bundled_scenario_names() {
  static const std::vector<std::string> names{
      "exterior_laws",       "kronecker_cohomology", "oneleaf_cohomology",
      "product_kunneth",     "classical_cat",        "cat_suspension",
      "morse_flow",          "kronecker_translation", "rprime_convergence",
      "intersection_products"};
  return names;
}

ScenarioConfig bundled_scenario(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  if (name == "exterior_laws") {
    c.model = one_leaf_json(2);
    c.checks = {"exterior_laws"};
    c.params = {{"random_forms", 100}};
  } else if (name == "kronecker_cohomology") {
    c.model = kronecker_model_json(kGolden);
    c.checks = {"harmonic_dimensions", "duality"};
    c.params = {{"expected_dimensions", std::vector<int>{1, 1}}, {"expect_finite", true}};
  } else if (name == "oneleaf_cohomology") {
    c.model = one_leaf_json(2);
    c.checks = {"harmonic_dimensions", "duality"};
    c.params = {{"expected_dimensions", std::vector<int>{1, 2, 1}}, {"expect_finite", true}};
  } else if (name == "product_kunneth") {
    c.model = kronecker_model_json(kGolden);
    c.checks = {"kunneth"};
    c.params = {{"direct_m_max", 20}};
  } else if (name == "classical_cat") {
    c.model = one_leaf_json(2);
    c.checks = {"classical_lefschetz"};
    c.params = {{"matrix", {{2, 1}, {1, 1}}},
                {"expected", std::vector<double>{-1.0, -5.0}}};
    c.truncation.m_max = 10;
  } else if (name == "cat_suspension") {
    c.model = cat_suspension_json();
    c.flow = {{"variant", "suspension"}};
    c.checks = {"suspension_atoms"};
    c.t_max = 5.0;
  } else if (name == "morse_flow") {
    c.model = one_leaf_json(2);
    c.flow = {{"variant", "vector_field"}, {"preset", "morse"}, {"step", 1e-3}};
    c.checks = {"dynamical_lefschetz"};
    c.t_max = 2.0;
    c.truncation.m_max = 10;
  } else if (name == "kronecker_translation") {
    c.model = kronecker_model_json(kGolden);
    c.flow = {{"variant", "affine"},
              {"velocity", std::vector<double>{1.0, 0.0}},
              {"velocity_along_leaf", true}};
    c.checks = {"dynamical_lefschetz", "coincidence_function"};
    c.t_max = 2.0;
  } else if (name == "rprime_convergence") {
    c.model = one_leaf_json(2);
    c.checks = {"rprime_convergence", "current_pairing"};
    c.params = {{"resolution", 192}, {"random_forms", 5}, {"nu", 16.0}};
  } else if (name == "intersection_products") {
    c.model = one_leaf_json(2);
    c.checks = {"intersection_products"};
    c.params = {{"t3_resolution", 96}};
  } else {
    throw std::invalid_argument("unknown bundled scenario '" + name + "'");
  }
  return c;
}

std::vector<std::string> emit_report(const ReportDocument& report, const std::string& out_dir,
                                     const std::string& format) {
  if (format != "json" && format != "csv" && format != "both")
    throw std::invalid_argument("emit_report: format must be json, csv or both");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  auto atomic_write = [&](const std::string& filename, const std::string& content) {
    fs::path target = fs::path(out_dir) / filename;
    fs::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("emit_report: cannot write " + tmp.string());
      out << content;
    }
    fs::rename(tmp, target);
    written.push_back(target.string());
  };

  if (format == "json" || format == "both")
    atomic_write(report.scenario + "_report.json", report.to_json().dump(2) + "\n");
  if (format == "csv" || format == "both") {
    DistributionOnRPlus empty = DistributionOnRPlus::zero({1.0, 2.0});
    const DistributionOnRPlus& d = report.distribution ? *report.distribution : empty;
    atomic_write(report.scenario + "_density.csv",
                 report.distribution ? d.density_csv() : "t,density\n");
    atomic_write(report.scenario + "_atoms.csv", d.atoms_csv());
  }
  return written;
}

}  // namespace leafcalc
