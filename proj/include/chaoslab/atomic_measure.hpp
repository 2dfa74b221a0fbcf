#pragma once

#include <functional>
#include <vector>

#include "chaoslab/point.hpp"

namespace chaoslab {

class RandomStream;

// Support point of an atomic measure: an ordered tuple of k >= 1 points from
// one space. Plain measures on S use width 1; k-marginal machinery uses k > 1.
// The tuple space carries the max metric over slots, which reduces to the
// point metric at width 1.
struct Atom {
  std::vector<Point> slots;

  Atom() = default;
  explicit Atom(Point p) : slots{std::move(p)} {}
  explicit Atom(std::vector<Point> s) : slots(std::move(s)) {}
  int width() const { return static_cast<int>(slots.size()); }
};

double distance(const Atom& a, const Atom& b);
bool operator==(const Atom& a, const Atom& b);
bool atom_less(const Atom& a, const Atom& b);

// Finitely supported probability measure. Always held in canonical coalesced
// form: atoms sorted (point_less lexicographically over slots), exact
// duplicates merged by adding weights, zero-weight atoms dropped. Weights are
// strictly positive and total 1 within 1e-12 (checked with compensated
// summation so honest large supports pass).
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  AtomicMeasure(std::vector<Atom> atoms, std::vector<double> weights);

  static AtomicMeasure dirac(const Point& p) { return dirac(Atom(p)); }
  static AtomicMeasure dirac(const Atom& a);
  // Width-1 convenience.
  static AtomicMeasure from_points(const std::vector<Point>& points,
                                   const std::vector<double>& weights);

  int support_size() const { return static_cast<int>(atoms_.size()); }
  int tuple_width() const;
  SpaceKind kind() const;
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  const Atom& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }

  // Width-1 accessor.
  const Point& point_at(int i) const;

  // Sum of w_i * f(atom_i).
  double integrate(const std::function<double(const Atom&)>& f) const;

  // Draws an atom index by weight (inverse CDF over the canonical order).
  int sample_index(RandomStream& rng) const;

  // Exact equality of canonical forms (bitwise on weights and coordinates).
  friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b);

 private:
  std::vector<Atom> atoms_;
  std::vector<double> weights_;
};

// Compensated (Neumaier) summation; used for every weight total in the library.
double stable_sum(const std::vector<double>& xs);

// k-fold product measure mu^(x)k on the tuple space; support grows like m^k,
// guarded by max_atoms (CapacityError beyond it). Requires width-1 input.
AtomicMeasure product_power(const AtomicMeasure& mu, int k, std::size_t max_atoms = 1000000);

}  // namespace chaoslab
