#include "chaoslab/point.hpp"

#include <cmath>

#include "chaoslab/errors.hpp"

namespace chaoslab {

std::string space_kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Scalar: return "scalar";
    case SpaceKind::Velocity3: return "velocity3";
    case SpaceKind::Phase: return "phase";
    case SpaceKind::Symbol: return "symbol";
  }
  throw InvalidInputError("unknown space kind");
}

SpaceKind space_kind_from_name(const std::string& name) {
  if (name == "scalar") return SpaceKind::Scalar;
  if (name == "velocity3") return SpaceKind::Velocity3;
  if (name == "phase") return SpaceKind::Phase;
  if (name == "symbol") return SpaceKind::Symbol;
  throw InvalidInputError("unknown space kind name: " + name);
}

Point::Point() : kind_(SpaceKind::Scalar), coords_(Eigen::VectorXd::Zero(1)) {}

Point Point::scalar(double v) {
  Point p;
  p.kind_ = SpaceKind::Scalar;
  p.coords_ = Eigen::VectorXd::Constant(1, v);
  return p;
}

Point Point::velocity3(const Eigen::Vector3d& v) {
  Point p;
  p.kind_ = SpaceKind::Velocity3;
  p.coords_ = v;
  return p;
}

Point Point::phase(const Eigen::VectorXd& position, const Eigen::VectorXd& velocity) {
  if (position.size() != velocity.size() || position.size() < 1)
    throw InvalidInputError("phase point needs position and velocity of equal size >= 1");
  Point p;
  p.kind_ = SpaceKind::Phase;
  p.coords_.resize(2 * position.size());
  p.coords_ << position, velocity;
  return p;
}

Point Point::symbol(int index) {
  if (index < 0) throw InvalidInputError("symbol index must be >= 0");
  Point p;
  p.kind_ = SpaceKind::Symbol;
  p.coords_ = Eigen::VectorXd::Constant(1, static_cast<double>(index));
  p.symbol_ = index;
  return p;
}

double Point::scalar_value() const {
  if (kind_ != SpaceKind::Scalar) throw InvalidInputError("not a scalar point");
  return coords_[0];
}

Eigen::Vector3d Point::velocity3_value() const {
  if (kind_ != SpaceKind::Velocity3) throw InvalidInputError("not a velocity3 point");
  return coords_;
}

Eigen::VectorXd Point::phase_position() const {
  if (kind_ != SpaceKind::Phase) throw InvalidInputError("not a phase point");
  return coords_.head(coords_.size() / 2);
}

Eigen::VectorXd Point::phase_velocity() const {
  if (kind_ != SpaceKind::Phase) throw InvalidInputError("not a phase point");
  return coords_.tail(coords_.size() / 2);
}

int Point::phase_dim() const {
  if (kind_ != SpaceKind::Phase) throw InvalidInputError("not a phase point");
  return static_cast<int>(coords_.size() / 2);
}

int Point::symbol_value() const {
  if (kind_ != SpaceKind::Symbol) throw InvalidInputError("not a symbol point");
  return symbol_;
}

double distance(const Point& a, const Point& b) {
  if (a.kind() != b.kind())
    throw InvalidInputError("distance: points from different spaces");
  switch (a.kind()) {
    case SpaceKind::Scalar:
      return std::abs(a.coords()[0] - b.coords()[0]);
    case SpaceKind::Velocity3:
      return (a.coords() - b.coords()).norm();
    case SpaceKind::Phase:
      if (a.coords().size() != b.coords().size())
        throw InvalidInputError("distance: phase points of different dimension");
      return (a.coords() - b.coords()).norm();
    case SpaceKind::Symbol:
      return a.symbol_value() == b.symbol_value() ? 0.0 : 1.0;
  }
  throw InvalidInputError("distance: unknown space kind");
}

bool operator==(const Point& a, const Point& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ == SpaceKind::Symbol) return a.symbol_ == b.symbol_;
  if (a.coords_.size() != b.coords_.size()) return false;
  for (Eigen::Index i = 0; i < a.coords_.size(); ++i)
    if (a.coords_[i] != b.coords_[i]) return false;
  return true;
}

bool point_less(const Point& a, const Point& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
  if (a.kind_ == SpaceKind::Symbol) return a.symbol_ < b.symbol_;
  const Eigen::Index na = a.coords_.size(), nb = b.coords_.size();
  if (na != nb) return na < nb;
  for (Eigen::Index i = 0; i < na; ++i) {
    if (a.coords_[i] < b.coords_[i]) return true;
    if (a.coords_[i] > b.coords_[i]) return false;
  }
  return false;
}

}  // namespace chaoslab
