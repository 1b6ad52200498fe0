#include "leafcalc/suspension.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace leafcalc {

SuspensionModel::SuspensionModel(IntMatrix monodromy) : a_(std::move(monodromy)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1)
    throw std::invalid_argument("suspension: square monodromy required");
  d_ = static_cast<int>(a_.rows());
  if (std::abs(integer_determinant(a_)) != 1)
    throw std::invalid_argument("suspension: monodromy must be invertible over the integers");

  Eigen::EigenSolver<Eigen::MatrixXd> es(a_.cast<double>());
  eigen_gap_ = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    eigen_gap_ = std::min(eigen_gap_, std::abs(std::abs(es.eigenvalues()(i)) - 1.0));
  hyperbolic_ = eigen_gap_ > 1e-9;
}

IntMatrix SuspensionModel::monodromy_power(int nu) const {
  if (nu < 0) throw std::invalid_argument("suspension: nonnegative power expected");
  IntMatrix r = IntMatrix::Identity(d_, d_);
  for (int i = 0; i < nu; ++i) r = r * a_;
  return r;
}

nlohmann::json SuspensionModel::to_json() const {
  nlohmann::json j;
  j["type"] = "suspension";
  j["ambient"] = d_ + 1;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < d_; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < d_; ++k) row.push_back(a_(i, k));
    rows.push_back(row);
  }
  j["monodromy"] = rows;
  return j;
}

SuspensionModel SuspensionModel::from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "suspension")
    throw std::invalid_argument("suspension json: wrong type");
  const auto& rows = j.at("monodromy");
  const int d = static_cast<int>(rows.size());
  IntMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) a(i, k) = rows.at(i).at(k).get<std::int64_t>();
  return SuspensionModel(std::move(a));
}

}  // namespace leafcalc
