#include "leafcalc/torus_model.hpp"

#include <cmath>
#include <stdexcept>

namespace leafcalc {

namespace {

// Gram-Schmidt in the given order; throws on dependent input.
Eigen::MatrixXd orthonormalize(int n, const std::vector<Eigen::VectorXd>& dirs) {
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(dirs.size()));
  int col = 0;
  for (const auto& d : dirs) {
    if (d.size() != n) throw std::invalid_argument("model: direction dimension mismatch");
    Eigen::VectorXd v = d;
    for (int j = 0; j < col; ++j) v -= out.col(j).dot(v) * out.col(j);
    double norm = v.norm();
    if (norm < 1e-10) throw std::invalid_argument("model: dependent tangential directions");
    out.col(col++) = v / norm;
  }
  return out;
}

}  // namespace

FoliatedTorusModel::FoliatedTorusModel(int n, int p, Eigen::MatrixXd W, Eigen::MatrixXd U,
                                       int orientation)
    : n_(n), p_(p), q_(n - p), W_(std::move(W)), U_(std::move(U)), orientation_(orientation) {
  if (orientation_ != 1 && orientation_ != -1)
    throw std::invalid_argument("model: orientation must be +1 or -1");
  Eigen::MatrixXd frame(n_, n_);
  frame.leftCols(p_) = W_;
  frame.rightCols(q_) = U_;
  if ((frame.transpose() * frame - Eigen::MatrixXd::Identity(n_, n_)).cwiseAbs().maxCoeff() >
      1e-10)
    throw std::invalid_argument("model: combined frame is not orthonormal");
}

std::shared_ptr<const FoliatedTorusModel> FoliatedTorusModel::from_directions(
    int n, const std::vector<Eigen::VectorXd>& tangential_directions, int orientation) {
  if (n < 1 || n > 8) throw std::invalid_argument("model: ambient dimension out of range");
  const int p = static_cast<int>(tangential_directions.size());
  if (p < 1 || p > n) throw std::invalid_argument("model: need 1..n tangential directions");

  Eigen::MatrixXd W = orthonormalize(n, tangential_directions);

  // Transverse frame: deterministic completion from the standard basis.
  Eigen::MatrixXd U(n, n - p);
  int col = 0;
  for (int i = 0; i < n && col < n - p; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, i);
    v -= W * (W.transpose() * v);
    for (int j = 0; j < col; ++j) v -= U.col(j).dot(v) * U.col(j);
    double norm = v.norm();
    if (norm < 1e-8) continue;
    U.col(col++) = v / norm;
  }
  if (col != n - p) throw std::runtime_error("model: failed to complete transverse frame");

  return std::shared_ptr<const FoliatedTorusModel>(
      new FoliatedTorusModel(n, p, std::move(W), std::move(U), orientation));
}

std::shared_ptr<const FoliatedTorusModel> FoliatedTorusModel::one_leaf(int n) {
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < n; ++i) dirs.push_back(Eigen::VectorXd::Unit(n, i));
  return from_directions(n, dirs);
}

std::shared_ptr<const FoliatedTorusModel> FoliatedTorusModel::product(
    const std::shared_ptr<const FoliatedTorusModel>& a,
    const std::shared_ptr<const FoliatedTorusModel>& b) {
  const int n = a->n_ + b->n_;
  const int p = a->p_ + b->p_;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, p);
  W.block(0, 0, a->n_, a->p_) = a->W_;
  W.block(a->n_, a->p_, b->n_, b->p_) = b->W_;
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n - p);
  U.block(0, 0, a->n_, a->q_) = a->U_;
  U.block(a->n_, a->q_, b->n_, b->q_) = b->U_;
  return std::shared_ptr<const FoliatedTorusModel>(new FoliatedTorusModel(
      n, p, std::move(W), std::move(U), a->orientation_ * b->orientation_));
}

nlohmann::json FoliatedTorusModel::to_json() const {
  nlohmann::json j;
  j["type"] = "torus";
  j["ambient"] = n_;
  nlohmann::json tang = nlohmann::json::array();
  for (int c = 0; c < p_; ++c) {
    nlohmann::json v = nlohmann::json::array();
    for (int i = 0; i < n_; ++i) v.push_back(W_(i, c));
    tang.push_back(v);
  }
  j["tangential"] = tang;
  j["orientation"] = orientation_;
  return j;
}

std::shared_ptr<const FoliatedTorusModel> FoliatedTorusModel::from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "torus")
    throw std::invalid_argument("model json: expected type torus");
  int n = j.at("ambient").get<int>();
  std::vector<Eigen::VectorXd> dirs;
  for (const auto& row : j.at("tangential")) {
    Eigen::VectorXd v(n);
    int i = 0;
    for (const auto& x : row) v(i++) = x.get<double>();
    if (i != n) throw std::invalid_argument("model json: direction length mismatch");
    dirs.push_back(v);
  }
  int orientation = j.value("orientation", 1);
  return from_directions(n, dirs, orientation);
}

Eigen::VectorXd torus_wrap(const Eigen::VectorXd& x) {
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double f = x(i) - std::floor(x(i));
    y(i) = (f >= 1.0) ? 0.0 : f;
  }
  return y;
}

Eigen::VectorXd exp_map(const FoliatedTorusModel&, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& xi) {
  return torus_wrap(x + xi);
}

Eigen::MatrixXd parallel_transport(const FoliatedTorusModel& model,
                                   const std::vector<Eigen::VectorXd>&) {
  return Eigen::MatrixXd::Identity(model.ambient_dim(), model.ambient_dim());
}

}  // namespace leafcalc
