#include "chaoslab/configuration.hpp"

#include "chaoslab/errors.hpp"

namespace chaoslab {

Configuration::Configuration(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty())
    throw InvalidInputError("configuration needs at least one particle");
  const SpaceKind k = points_[0].kind();
  const Eigen::Index width = points_[0].coords().size();
  for (const Point& p : points_) {
    if (p.kind() != k)
      throw InvalidInputError("configuration mixes state-space variants");
    if (p.kind() == SpaceKind::Phase && p.coords().size() != width)
      throw InvalidInputError("configuration mixes phase dimensions");
  }
}

SpaceKind Configuration::kind() const {
  if (points_.empty()) throw InvalidInputError("empty configuration");
  return points_[0].kind();
}

Eigen::VectorXd Configuration::scalars() const {
  Eigen::VectorXd out(n());
  for (int i = 0; i < n(); ++i) out[i] = points_[static_cast<std::size_t>(i)].scalar_value();
  return out;
}

std::vector<Eigen::Vector3d> Configuration::velocities3() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(points_.size());
  for (const Point& p : points_) out.push_back(p.velocity3_value());
  return out;
}

std::vector<int> Configuration::symbols() const {
  std::vector<int> out;
  out.reserve(points_.size());
  for (const Point& p : points_) out.push_back(p.symbol_value());
  return out;
}

Eigen::MatrixXd Configuration::phase_matrix() const {
  const int d2 = 2 * phase_dim();
  Eigen::MatrixXd out(d2, n());
  for (int i = 0; i < n(); ++i) out.col(i) = points_[static_cast<std::size_t>(i)].coords();
  return out;
}

int Configuration::phase_dim() const {
  if (points_.empty()) throw InvalidInputError("empty configuration");
  return points_[0].phase_dim();
}

Configuration Configuration::from_scalars(const Eigen::VectorXd& v) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) pts.push_back(Point::scalar(v[i]));
  return Configuration(std::move(pts));
}

Configuration Configuration::from_velocities3(const std::vector<Eigen::Vector3d>& v) {
  std::vector<Point> pts;
  pts.reserve(v.size());
  for (const auto& x : v) pts.push_back(Point::velocity3(x));
  return Configuration(std::move(pts));
}

Configuration Configuration::from_symbols(const std::vector<int>& s) {
  std::vector<Point> pts;
  pts.reserve(s.size());
  for (int x : s) pts.push_back(Point::symbol(x));
  return Configuration(std::move(pts));
}

Configuration Configuration::from_phase_matrix(const Eigen::MatrixXd& cols, int dim) {
  if (cols.rows() != 2 * dim)
    throw InvalidInputError("phase matrix must have 2*dim rows");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(cols.cols()));
  for (Eigen::Index i = 0; i < cols.cols(); ++i)
    pts.push_back(Point::phase(cols.col(i).head(dim), cols.col(i).tail(dim)));
  return Configuration(std::move(pts));
}

}  // namespace chaoslab
