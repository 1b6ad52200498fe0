#pragma once

#include <string>
#include <vector>

#include "leafcalc/json_fwd.hpp"

namespace leafcalc {

struct DiracAtom {
  double t = 0.0;
  double weight = 0.0;
};

/// Distribution on the positive time axis: a smooth density sampled on a
/// strictly increasing grid plus a sorted list of Dirac atoms.
class DistributionOnRPlus {
 public:
  DistributionOnRPlus() = default;
  DistributionOnRPlus(std::vector<double> grid, std::vector<double> density,
                      std::vector<DiracAtom> atoms = {});

  static std::vector<double> uniform_grid(double t_max, int samples = 512);
  static DistributionOnRPlus zero(std::vector<double> grid);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }
  const std::vector<DiracAtom>& atoms() const { return atoms_; }

  /// Linear interpolation of the density; zero outside the grid.
  double density_at(double t) const;

  void add_density(const std::vector<double>& d);
  void add_atom(double t, double weight);
  /// Merges atoms with coincident positions (absolute tolerance on t).
  void aggregate_atoms(double tol = 1e-9);

  nlohmann::json to_json() const;
  static DistributionOnRPlus from_json(const nlohmann::json& j);
  std::string density_csv() const;
  std::string atoms_csv() const;

 private:
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<DiracAtom> atoms_;
};

/// Pairing with a test function sampled on the distribution's grid:
/// trapezoidal integral of density times g plus the atom sum with g
/// interpolated linearly. The samples must vanish at the grid ends
/// (compact support inside the grid).
double pair_distribution(const DistributionOnRPlus& d, const std::vector<double>& g_samples);

}  // namespace leafcalc
