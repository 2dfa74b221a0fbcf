#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace chaoslab {

// State-space variants a particle can live in. Each carries its own metric:
// absolute difference, Euclidean norm, Euclidean norm on the stacked
// (position, velocity) vector, and the discrete 0/1 metric for symbols.
enum class SpaceKind : std::uint8_t { Scalar, Velocity3, Phase, Symbol };

std::string space_kind_name(SpaceKind kind);
SpaceKind space_kind_from_name(const std::string& name);

class Point {
 public:
  Point();  // scalar 0; a default only so containers work

  static Point scalar(double v);
  static Point velocity3(const Eigen::Vector3d& v);
  // Phase point in R^d x R^d; position and velocity must have equal size d >= 1.
  static Point phase(const Eigen::VectorXd& position, const Eigen::VectorXd& velocity);
  static Point symbol(int index);  // index >= 0

  SpaceKind kind() const { return kind_; }

  double scalar_value() const;
  Eigen::Vector3d velocity3_value() const;
  Eigen::VectorXd phase_position() const;
  Eigen::VectorXd phase_velocity() const;
  int phase_dim() const;  // d for phase points
  int symbol_value() const;

  // Numeric payload: [v] / [vx,vy,vz] / [x..., v...] / [index].
  const Eigen::VectorXd& coords() const { return coords_; }

 private:
  SpaceKind kind_;
  Eigen::VectorXd coords_;
  int symbol_ = -1;

  friend bool operator==(const Point& a, const Point& b);
  friend bool point_less(const Point& a, const Point& b);
};

// Intrinsic metric of the point's space. Throws InvalidInputError when the
// two points are not from the same space (kind and, for phase, dimension).
double distance(const Point& a, const Point& b);

// Exact equality: same kind and bitwise-equal payload (same symbol index).
bool operator==(const Point& a, const Point& b);
inline bool operator!=(const Point& a, const Point& b) { return !(a == b); }

// Strict total order used for canonical sorting of measure supports:
// by kind, then symbol index or lexicographic coordinates.
bool point_less(const Point& a, const Point& b);

}  // namespace chaoslab
