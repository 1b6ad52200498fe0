#include "leafcalc/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace leafcalc {

DistributionOnRPlus::DistributionOnRPlus(std::vector<double> grid, std::vector<double> density,
                                         std::vector<DiracAtom> atoms)
    : grid_(std::move(grid)), density_(std::move(density)), atoms_(std::move(atoms)) {
  if (grid_.size() != density_.size())
    throw std::invalid_argument("distribution: grid/density size mismatch");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1]))
      throw std::invalid_argument("distribution: grid must be strictly increasing");
  for (const auto& a : atoms_)
    if (!std::isfinite(a.weight) || !(a.t > 0))
      throw std::invalid_argument("distribution: atoms need positive time and finite weight");
  std::sort(atoms_.begin(), atoms_.end(),
            [](const DiracAtom& a, const DiracAtom& b) { return a.t < b.t; });
}

std::vector<double> DistributionOnRPlus::uniform_grid(double t_max, int samples) {
  if (!(t_max > 0) || samples < 2) throw std::invalid_argument("uniform_grid: bad parameters");
  std::vector<double> g(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    g[static_cast<std::size_t>(i)] = t_max * static_cast<double>(i + 1) / samples;
  return g;
}

DistributionOnRPlus DistributionOnRPlus::zero(std::vector<double> grid) {
  std::vector<double> density(grid.size(), 0.0);
  return DistributionOnRPlus(std::move(grid), std::move(density));
}

double DistributionOnRPlus::density_at(double t) const {
  if (grid_.empty() || t < grid_.front() || t > grid_.back()) return 0.0;
  auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
  if (hi == 0) return density_.front();
  double t0 = grid_[hi - 1], t1 = grid_[hi];
  double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * density_[hi - 1] + w * density_[hi];
}

void DistributionOnRPlus::add_density(const std::vector<double>& d) {
  if (d.size() != density_.size()) throw std::invalid_argument("add_density: size mismatch");
  for (std::size_t i = 0; i < d.size(); ++i) density_[i] += d[i];
}

void DistributionOnRPlus::add_atom(double t, double weight) {
  if (!(t > 0)) throw std::invalid_argument("add_atom: positive time expected");
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t,
                             [](const DiracAtom& a, double v) { return a.t < v; });
  atoms_.insert(it, DiracAtom{t, weight});
}

void DistributionOnRPlus::aggregate_atoms(double tol) {
  std::vector<DiracAtom> merged;
  for (const auto& a : atoms_) {
    if (!merged.empty() && std::abs(merged.back().t - a.t) <= tol)
      merged.back().weight += a.weight;
    else
      merged.push_back(a);
  }
  atoms_ = std::move(merged);
}

nlohmann::json DistributionOnRPlus::to_json() const {
  nlohmann::json j;
  j["grid"] = grid_;
  j["density"] = density_;
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : atoms_) atoms.push_back({{"t", a.t}, {"w", a.weight}});
  j["atoms"] = atoms;
  return j;
}

DistributionOnRPlus DistributionOnRPlus::from_json(const nlohmann::json& j) {
  std::vector<double> grid = j.at("grid").get<std::vector<double>>();
  std::vector<double> density = j.at("density").get<std::vector<double>>();
  std::vector<DiracAtom> atoms;
  for (const auto& a : j.at("atoms"))
    atoms.push_back({a.at("t").get<double>(), a.at("w").get<double>()});
  return DistributionOnRPlus(std::move(grid), std::move(density), std::move(atoms));
}

std::string DistributionOnRPlus::density_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,density\n";
  for (std::size_t i = 0; i < grid_.size(); ++i) out << grid_[i] << "," << density_[i] << "\n";
  return out.str();
}

std::string DistributionOnRPlus::atoms_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,weight\n";
  for (const auto& a : atoms_) out << a.t << "," << a.weight << "\n";
  return out.str();
}

double pair_distribution(const DistributionOnRPlus& d, const std::vector<double>& g_samples) {
  const auto& grid = d.grid();
  if (g_samples.size() != grid.size())
    throw std::invalid_argument("pair_distribution: sample count mismatch");
  if (grid.size() < 2) throw std::invalid_argument("pair_distribution: grid too small");
  if (std::abs(g_samples.front()) > 1e-12 || std::abs(g_samples.back()) > 1e-12)
    throw std::invalid_argument("pair_distribution: test function support escapes the grid");

  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double h = grid[i] - grid[i - 1];
    acc += 0.5 * h *
           (d.density()[i] * g_samples[i] + d.density()[i - 1] * g_samples[i - 1]);
  }
  for (const auto& a : d.atoms()) {
    if (a.t < grid.front() || a.t > grid.back())
      throw std::invalid_argument("pair_distribution: atom outside the sampled grid");
    auto it = std::lower_bound(grid.begin(), grid.end(), a.t);
    std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    double g;
    if (hi == 0)
      g = g_samples.front();
    else {
      double t0 = grid[hi - 1], t1 = grid[hi];
      double w = (a.t - t0) / (t1 - t0);
      g = (1.0 - w) * g_samples[hi - 1] + w * g_samples[hi];
    }
    acc += a.weight * g;
  }
  return acc;
}

}  // namespace leafcalc
