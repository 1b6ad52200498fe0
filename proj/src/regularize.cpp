#include "leafcalc/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "leafcalc/parallel.hpp"

namespace leafcalc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double glue(double u) {  // 0 for u <= 0, 1 for u >= 1, C^infty monotone
  auto e = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  double a = e(u);
  double b = e(1.0 - u);
  return a / (a + b);
}

double sphere_surface(int dim) {
  // surface measure of S^{dim-1}
  switch (dim) {
    case 1: return 2.0;
    case 2: return kTwoPi;
    case 3: return 2.0 * kTwoPi;
    default:
      return 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
  }
}

}  // namespace

double BumpProfile::operator()(double s) const {
  if (s <= 1.0 / 3.0) return 1.0;
  if (s >= 2.0 / 3.0) return 0.0;
  return glue(2.0 - 3.0 * s);
}

RadialBumpKernel::RadialBumpKernel(int dim, double nu) : dim_(dim), nu_(nu) {
  if (dim_ < 0) throw std::invalid_argument("bump kernel: negative dimension");
  if (!(nu_ > 0)) throw std::invalid_argument("bump kernel: positive scale expected");
  if (dim_ == 0) {
    norm_ = 1.0;
    return;
  }
  // Z = surface(S^{dim-1}) int_0^{2/3} rho(r) r^{dim-1} dr  (composite Simpson)
  BumpProfile rho;
  const int samples = 20001;
  const double upper = 2.0 / 3.0;
  const double h = upper / (samples - 1);
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r = i * h;
    double w = (i == 0 || i == samples - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * rho(r) * std::pow(r, dim_ - 1);
  }
  acc *= h / 3.0;
  norm_ = sphere_surface(dim_) * acc;
}

double RadialBumpKernel::density(double r) const {
  if (dim_ == 0) return 1.0;
  BumpProfile rho;
  return std::pow(nu_, dim_) * rho(nu_ * r) / norm_;
}

ThomBump thom_bump_form(ModelPtr model, double nu) {
  if (!(nu >= 2.0))
    throw std::invalid_argument(
        "thom_bump_form: nu >= 2 keeps the support inside the injectivity radius");
  return ThomBump{model, nu, RadialBumpKernel(model->leaf_dim(), nu),
                  RadialBumpKernel(model->transverse_dim(), nu)};
}

double ThomBump::fiber_integral(int samples_per_axis) const {
  const int p = model->leaf_dim();
  const int q = model->transverse_dim();
  const double r = tangential.support_radius();

  auto radial_box_integral = [&](const RadialBumpKernel& kernel, int dim) {
    if (dim == 0) return 1.0;
    std::int64_t cells = 1;
    for (int i = 0; i < dim; ++i) cells *= samples_per_axis;
    double h = 2.0 * r / samples_per_axis;
    double acc = 0.0;
    for (std::int64_t flat = 0; flat < cells; ++flat) {
      std::int64_t rest = flat;
      double norm2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        double c = -r + (static_cast<double>(rest % samples_per_axis) + 0.5) * h;
        norm2 += c * c;
        rest /= samples_per_axis;
      }
      acc += kernel.density(std::sqrt(norm2));
    }
    return acc * std::pow(h, dim);
  };

  return radial_box_integral(tangential, p) * radial_box_integral(transverse, q);
}

GridForm::GridForm(ModelPtr model, int degree, int resolution)
    : model_(std::move(model)), degree_(degree), resolution_(resolution) {
  if (resolution_ < 2) throw std::invalid_argument("grid form: resolution too small");
  cells_ = 1;
  for (int i = 0; i < model_->ambient_dim(); ++i) cells_ *= resolution_;
  sets_ = index_sets_of_degree(model_->leaf_dim(), degree_);
  data_.assign(sets_.size(), std::vector<double>(static_cast<std::size_t>(cells_), 0.0));
}

GridForm GridForm::sample(const TangentialForm& f, int resolution) {
  if (!f.real_flagged())
    throw std::invalid_argument("grid form sampling expects a real form");
  GridForm g(f.model(), f.degree(), resolution);
  const int n = f.model()->ambient_dim();
  for (std::size_t s = 0; s < g.sets_.size(); ++s) {
    auto& field = g.data_[s];
    IndexSet I = g.sets_[s];
    parallel_for(g.cells_, [&](std::int64_t begin, std::int64_t end) {
      Eigen::VectorXd x(n);
      for (std::int64_t flat = begin; flat < end; ++flat) {
        std::int64_t rest = flat;
        for (int i = 0; i < n; ++i) {
          x(i) = static_cast<double>(rest % resolution) / resolution;
          rest /= resolution;
        }
        field[static_cast<std::size_t>(flat)] = f.evaluate_component(I, x).real();
      }
    });
  }
  return g;
}

std::vector<double>& GridForm::component(IndexSet I) {
  for (std::size_t s = 0; s < sets_.size(); ++s)
    if (sets_[s] == I) return data_[s];
  throw std::invalid_argument("grid form: no such index set");
}

const std::vector<double>& GridForm::component(IndexSet I) const {
  return const_cast<GridForm*>(this)->component(I);
}

double GridForm::interpolate(IndexSet I, const Eigen::VectorXd& x) const {
  const int n = model_->ambient_dim();
  const auto& field = component(I);
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double xi = x(i) - std::floor(x(i));
    double scaled = xi * resolution_;
    int cell = static_cast<int>(std::floor(scaled));
    if (cell >= resolution_) cell = resolution_ - 1;
    base[static_cast<std::size_t>(i)] = cell;
    frac[static_cast<std::size_t>(i)] = scaled - cell;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    std::int64_t flat = 0;
    std::int64_t stride = 1;
    for (int i = 0; i < n; ++i) {
      int bit = (corner >> i) & 1;
      w *= bit ? frac[static_cast<std::size_t>(i)] : 1.0 - frac[static_cast<std::size_t>(i)];
      int idx = (base[static_cast<std::size_t>(i)] + bit) % resolution_;
      flat += stride * idx;
      stride *= resolution_;
    }
    acc += w * field[static_cast<std::size_t>(flat)];
  }
  return acc;
}

double GridForm::max_abs() const {
  double m = 0.0;
  for (const auto& field : data_)
    for (double v : field) m = std::max(m, std::abs(v));
  return m;
}

GridForm GridForm::operator-(const GridForm& o) const {
  GridForm r = *this;
  for (std::size_t s = 0; s < data_.size(); ++s)
    for (std::size_t i = 0; i < r.data_[s].size(); ++i) r.data_[s][i] -= o.data_[s][i];
  return r;
}

GridForm GridForm::operator+(const GridForm& o) const {
  GridForm r = *this;
  for (std::size_t s = 0; s < data_.size(); ++s)
    for (std::size_t i = 0; i < r.data_[s].size(); ++i) r.data_[s][i] += o.data_[s][i];
  return r;
}

GridForm GridForm::operator*(double sc) const {
  GridForm r = *this;
  for (auto& field : r.data_)
    for (double& v : field) v *= sc;
  return r;
}

namespace {

struct DiscreteKernel {
  std::vector<std::array<int, 8>> offsets;
  std::vector<double> weights;  // normalized to sum 1
};

DiscreteKernel build_kernel(const ModelPtr& model_ptr, double nu, int resolution) {
  ThomBump bump = thom_bump_form(model_ptr, nu);
  const FoliatedTorusModel& model = *model_ptr;
  const int n = model.ambient_dim();
  const double radius = bump.tangential.support_radius();
  const int span = static_cast<int>(std::ceil(radius * resolution)) + 1;

  DiscreteKernel k;
  std::array<int, 8> off{};
  std::int64_t count = 1;
  for (int i = 0; i < n; ++i) count *= 2 * span + 1;
  double total = 0.0;
  for (std::int64_t flat = 0; flat < count; ++flat) {
    std::int64_t rest = flat;
    Eigen::VectorXd delta(n);
    for (int i = 0; i < n; ++i) {
      int o = static_cast<int>(rest % (2 * span + 1)) - span;
      off[static_cast<std::size_t>(i)] = o;
      delta(i) = static_cast<double>(o) / resolution;
      rest /= (2 * span + 1);
    }
    double rf = (model.leaf_dim() > 0)
                    ? (model.tangential_frame().transpose() * delta).norm()
                    : 0.0;
    double rq = (model.transverse_dim() > 0)
                    ? (model.transverse_frame().transpose() * delta).norm()
                    : 0.0;
    double w = bump.value(rf, rq);
    if (w <= 0.0) continue;
    k.offsets.push_back(off);
    k.weights.push_back(w);
    total += w;
  }
  for (double& w : k.weights) w /= total;  // exact unit mass on the grid
  return k;
}

std::vector<double> convolve_component(const std::vector<double>& in, int n, int resolution,
                                       const DiscreteKernel& kernel) {
  std::vector<double> out(in.size(), 0.0);
  const std::int64_t cells = static_cast<std::int64_t>(in.size());
  parallel_for(cells, [&](std::int64_t begin, std::int64_t end) {
    std::vector<int> coord(static_cast<std::size_t>(n));
    for (std::int64_t flat = begin; flat < end; ++flat) {
      std::int64_t rest = flat;
      for (int i = 0; i < n; ++i) {
        coord[static_cast<std::size_t>(i)] = static_cast<int>(rest % resolution);
        rest /= resolution;
      }
      double acc = 0.0;
      for (std::size_t t = 0; t < kernel.weights.size(); ++t) {
        std::int64_t src = 0;
        std::int64_t stride = 1;
        for (int i = 0; i < n; ++i) {
          int idx = coord[static_cast<std::size_t>(i)] + kernel.offsets[t][static_cast<std::size_t>(i)];
          idx %= resolution;
          if (idx < 0) idx += resolution;
          src += stride * idx;
          stride *= resolution;
        }
        acc += kernel.weights[t] * in[static_cast<std::size_t>(src)];
      }
      out[static_cast<std::size_t>(flat)] = acc;
    }
  });
  return out;
}

GridForm mollify(const GridForm& w, double nu) {
  if (w.resolution() < 4 * nu)
    throw std::invalid_argument("mollify: grid under-resolved for this nu (need >= 4 nu)");
  DiscreteKernel kernel = build_kernel(w.model(), nu, w.resolution());
  GridForm out(w.model(), w.degree(), w.resolution());
  for (IndexSet I : w.index_sets())
    out.component(I) =
        convolve_component(w.component(I), w.model()->ambient_dim(), w.resolution(), kernel);
  return out;
}

}  // namespace

GridForm smooth_form_rprime(const GridForm& w, double nu) {
  const int p = w.model()->leaf_dim();
  double sign = signs::rprime(p, w.degree());
  return mollify(w, nu) * sign;
}

int current_dimension(const GridCurrent& c) {
  return std::visit([](const auto& v) { return v.dimension(); }, c);
}

GridForm regularize_current(const GridCurrent& s, double nu, int resolution) {
  if (const auto* fc = std::get_if<FormCurrent>(&s)) {
    const int p = fc->form.model()->leaf_dim();
    const int k = fc->dimension();
    GridForm sampled = GridForm::sample(fc->form, resolution);
    return mollify(sampled, nu) * static_cast<double>(signs::parity(p * k));
  }

  const auto& sc = std::get<SubtorusCurrent>(s);
  const auto& sub = sc.subtorus;
  const auto& model = *sub.model();
  const int n = model.ambient_dim();
  const int p = model.leaf_dim();
  const int k = sub.leaf_dim();
  if (resolution < 4 * nu)
    throw std::invalid_argument("regularize_current: grid under-resolved for this nu");

  const Eigen::MatrixXd& nf = sub.normal_leafwise_frame();    // n x (p-k)
  const Eigen::MatrixXd& nq = sub.normal_transverse_frame();  // n x (q-u)
  RadialBumpKernel leaf_kernel(static_cast<int>(nf.cols()), nu);
  RadialBumpKernel trans_kernel(static_cast<int>(nq.cols()), nu);

  // distinct normal-coordinate shifts of the lattice translates near a cell
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> shifts;
  {
    std::int64_t count = 1;
    for (int i = 0; i < n; ++i) count *= 3;
    for (std::int64_t flat = 0; flat < count; ++flat) {
      std::int64_t rest = flat;
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) {
        z(i) = static_cast<double>(rest % 3) - 1.0;
        rest /= 3;
      }
      Eigen::VectorXd sf = nf.transpose() * z;
      Eigen::VectorXd sq = nq.transpose() * z;
      bool dup = false;
      for (const auto& [a, b] : shifts)
        if ((a - sf).norm() < 1e-9 && (b - sq).norm() < 1e-9) {
          dup = true;
          break;
        }
      if (!dup) shifts.emplace_back(sf, sq);
    }
  }

  // oriented conormal frame form: coefficient of theta^J is the J-minor of
  // the normal frame in tangential coordinates
  Eigen::MatrixXd nf_coords = model.tangential_frame().transpose() * nf;  // p x (p-k)
  GridForm out(sub.model(), p - k, resolution);
  std::vector<double> coeffs;
  for (IndexSet J : out.index_sets()) {
    auto rows = J.elements();
    Eigen::MatrixXd minor(J.degree(), J.degree());
    for (int a = 0; a < J.degree(); ++a)
      for (int b = 0; b < J.degree(); ++b)
        minor(a, b) = nf_coords(rows[static_cast<std::size_t>(a)], b);
    coeffs.push_back(small_determinant(minor));
  }

  const double sign = signs::current_normal(k);
  const Eigen::VectorXd base = sub.basepoint();
  std::vector<std::vector<double>*> fields;
  for (IndexSet J : out.index_sets()) fields.push_back(&out.component(J));

  parallel_for(out.cell_count(), [&](std::int64_t begin, std::int64_t end) {
    Eigen::VectorXd x(n);
    for (std::int64_t flat = begin; flat < end; ++flat) {
      std::int64_t rest = flat;
      for (int i = 0; i < n; ++i) {
        x(i) = static_cast<double>(rest % resolution) / resolution;
        rest /= resolution;
      }
      Eigen::VectorXd delta = x - base;
      Eigen::VectorXd df = nf.transpose() * delta;
      Eigen::VectorXd dq = nq.transpose() * delta;
      double density = 0.0;
      for (const auto& [sf, sq] : shifts)
        density += leaf_kernel.density((df + sf).norm()) * trans_kernel.density((dq + sq).norm());
      if (density == 0.0) continue;
      for (std::size_t c = 0; c < coeffs.size(); ++c)
        (*fields[c])[static_cast<std::size_t>(flat)] = sign * density * coeffs[c];
    }
  });
  return out;
}

namespace {

// pointwise frame-component contraction of (alpha ^ eta) against a k-frame
// minor table
double wedge_contract(const GridForm& alpha, const TangentialForm& eta, const Eigen::VectorXd& x,
                      const std::vector<std::pair<IndexSet, double>>& minors) {
  auto eta_vals = eta.evaluate(x);
  double acc = 0.0;
  for (const auto& [K, minor] : minors) {
    if (minor == 0.0) continue;
    double val = 0.0;
    for (IndexSet I : alpha.index_sets()) {
      for (const auto& [J, ev] : eta_vals) {
        if (I.set_union(J) != K) continue;
        int sgn = wedge_sign(I, J);
        if (sgn == 0) continue;
        val += sgn * alpha.interpolate(I, x) * ev.real();
      }
    }
    acc += val * minor;
  }
  return acc;
}

}  // namespace

double pair_current(const GridCurrent& s, const GridForm& alpha, const TangentialForm& eta,
                    int quad_per_axis) {
  const int target = current_dimension(s);
  if (alpha.degree() + eta.degree() != target)
    throw std::invalid_argument("pair_current: degree mismatch");

  if (const auto* sc = std::get_if<SubtorusCurrent>(&s)) {
    const auto& sub = sc->subtorus;
    auto sets = index_sets_of_degree(sub.model()->leaf_dim(), target);
    std::vector<std::pair<IndexSet, double>> minors;
    for (IndexSet K : sets) minors.emplace_back(K, sub.frame_minor(K));
    return sub.pair_quadrature(
        [&](const Eigen::VectorXd& x) { return wedge_contract(alpha, eta, x, minors); },
        quad_per_axis);
  }

  const auto& fc = std::get<FormCurrent>(s);
  // <S_omega, beta> = int omega ^ beta vol_Q by full-grid quadrature
  const auto& model = *fc.form.model();
  const int n = model.ambient_dim();
  const int p = model.leaf_dim();
  std::int64_t cells = 1;
  for (int i = 0; i < n; ++i) cells *= quad_per_axis;
  IndexSet full = IndexSet::full(p);

  double acc = 0.0;
  Eigen::VectorXd x(n);
  for (std::int64_t flat = 0; flat < cells; ++flat) {
    std::int64_t rest = flat;
    for (int i = 0; i < n; ++i) {
      x(i) = static_cast<double>(rest % quad_per_axis) / quad_per_axis;
      rest /= quad_per_axis;
    }
    auto omega_vals = fc.form.evaluate(x);
    auto eta_vals = eta.evaluate(x);
    double point = 0.0;
    for (const auto& [I, ov] : omega_vals) {
      // (omega ^ alpha ^ eta)_full at x
      for (IndexSet J : alpha.index_sets()) {
        if (!I.disjoint(J)) continue;
        IndexSet IJ = I.set_union(J);
        int s1 = wedge_sign(I, J);
        for (const auto& [K, ev] : eta_vals) {
          if (IJ.set_union(K) != full) continue;
          int s2 = wedge_sign(IJ, K);
          if (s2 == 0) continue;
          point += s1 * s2 * ov.real() * alpha.interpolate(J, x) * ev.real();
        }
      }
    }
    acc += point;
  }
  return acc / static_cast<double>(cells);
}

double pair_current_exact(const GridCurrent& s, const TangentialForm& omega) {
  if (const auto* sc = std::get_if<SubtorusCurrent>(&s)) return sc->subtorus.pair(omega);
  const auto& fc = std::get<FormCurrent>(s);
  return integrate_volq(wedge(fc.form, omega));
}

IntersectionSequence intersection_product_numeric(const GridCurrent& s, const GridCurrent& t,
                                                  const TangentialForm& eta,
                                                  const std::vector<double>& nus, int resolution,
                                                  int quad_per_axis) {
  if (nus.size() < 2)
    throw std::invalid_argument("intersection_product_numeric: need at least two scales");
  const int p = eta.model()->leaf_dim();
  const int l = current_dimension(t);
  const int k = current_dimension(s);
  if (k + l < p) throw std::invalid_argument("intersection_product_numeric: k + l >= p required");

  IntersectionSequence out;
  const double prefactor = signs::intersection_prefactor(p, l);
  for (double nu : nus) {
    GridForm rt = regularize_current(t, nu, resolution);
    double v = prefactor * pair_current(s, rt, eta, quad_per_axis);
    out.nu_values.push_back(nu);
    out.pairings.push_back(v);
  }

  // two-term Richardson fit v = v_inf + a/nu (+ b/nu^2 with three points);
  // the error estimate is the spread between the fits
  const std::size_t m = out.pairings.size();
  auto linear_fit = [&](std::size_t i0, std::size_t i1) {
    double h0 = 1.0 / out.nu_values[i0], h1 = 1.0 / out.nu_values[i1];
    double v0 = out.pairings[i0], v1 = out.pairings[i1];
    return v1 + (v1 - v0) * h1 / (h0 - h1);
  };
  double lin = linear_fit(m - 2, m - 1);
  double full = lin;
  if (m >= 3) {
    Eigen::MatrixXd a(static_cast<int>(m), 3);
    Eigen::VectorXd b(static_cast<int>(m));
    for (std::size_t i = 0; i < m; ++i) {
      double h = 1.0 / out.nu_values[i];
      a(static_cast<int>(i), 0) = 1.0;
      a(static_cast<int>(i), 1) = h;
      a(static_cast<int>(i), 2) = h * h;
      b(static_cast<int>(i)) = out.pairings[i];
    }
    Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);
    full = coef(0);
  }
  out.extrapolated = full;
  out.error_estimate = std::max(std::abs(full - lin), 1e-12);

  for (std::size_t i = 2; i < m; ++i) {
    double d_prev = std::abs(out.pairings[i - 1] - out.pairings[i - 2]);
    double d_cur = std::abs(out.pairings[i] - out.pairings[i - 1]);
    if (d_cur > 2.0 * d_prev && d_cur > 1e-10) out.converged = false;
  }
  return out;
}

double intersection_closed_form(const GridCurrent& s, const GridCurrent& t,
                                const TangentialForm& eta) {
  if (std::holds_alternative<FormCurrent>(s) && std::holds_alternative<FormCurrent>(t)) {
    const auto& fs = std::get<FormCurrent>(s).form;
    const auto& ft = std::get<FormCurrent>(t).form;
    return integrate_volq(wedge(wedge(fs, ft), eta));
  }
  if (!std::holds_alternative<SubtorusCurrent>(s) || !std::holds_alternative<SubtorusCurrent>(t))
    throw std::invalid_argument("intersection_closed_form: mixed current kinds unsupported");

  const auto& ss = std::get<SubtorusCurrent>(s).subtorus;
  const auto& st = std::get<SubtorusCurrent>(t).subtorus;
  auto inter = check_transversal_submanifolds(ss, st);
  if (!inter.nonempty) return 0.0;
  if (!inter.transversal)
    throw std::invalid_argument("intersection_closed_form: non-transversal with intersection");

  const int p = ss.model()->leaf_dim();
  double sign = signs::closed_form(p, ss.leaf_dim(), st.leaf_dim());
  double h = h_factor(ss, st);
  double pairing = 0.0;
  for (const auto& comp : inter.components) pairing += comp.pair(eta);
  return sign * h * pairing;
}

}  // namespace leafcalc
