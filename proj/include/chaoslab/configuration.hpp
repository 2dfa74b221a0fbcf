#pragma once

#include <Eigen/Dense>
#include <vector>

#include "chaoslab/point.hpp"

namespace chaoslab {

// Ordered state of an n-particle system. All points share one space variant
// (and, for phase points, one dimension); n >= 1.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<Point> points);

  int n() const { return static_cast<int>(points_.size()); }
  SpaceKind kind() const;
  const Point& operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }
  const std::vector<Point>& points() const { return points_; }

  // Bulk views used by the simulators; each throws unless the variant matches.
  Eigen::VectorXd scalars() const;
  std::vector<Eigen::Vector3d> velocities3() const;
  std::vector<int> symbols() const;
  // Phase view: one column per particle, stacked [position; velocity].
  Eigen::MatrixXd phase_matrix() const;
  int phase_dim() const;

  static Configuration from_scalars(const Eigen::VectorXd& v);
  static Configuration from_velocities3(const std::vector<Eigen::Vector3d>& v);
  static Configuration from_symbols(const std::vector<int>& s);
  static Configuration from_phase_matrix(const Eigen::MatrixXd& cols, int dim);

 private:
  std::vector<Point> points_;
};

}  // namespace chaoslab
