#include "chaoslab/atomic_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chaoslab/errors.hpp"
#include "chaoslab/random_stream.hpp"

namespace chaoslab {

double distance(const Atom& a, const Atom& b) {
  if (a.width() != b.width())
    throw InvalidInputError("atom distance: tuple widths differ");
  double d = 0.0;
  for (int i = 0; i < a.width(); ++i)
    d = std::max(d, distance(a.slots[static_cast<std::size_t>(i)],
                             b.slots[static_cast<std::size_t>(i)]));
  return d;
}

bool operator==(const Atom& a, const Atom& b) {
  if (a.width() != b.width()) return false;
  for (std::size_t i = 0; i < a.slots.size(); ++i)
    if (!(a.slots[i] == b.slots[i])) return false;
  return true;
}

bool atom_less(const Atom& a, const Atom& b) {
  if (a.width() != b.width()) return a.width() < b.width();
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    if (point_less(a.slots[i], b.slots[i])) return true;
    if (point_less(b.slots[i], a.slots[i])) return false;
  }
  return false;
}

double stable_sum(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms, std::vector<double> weights) {
  if (atoms.size() != weights.size())
    throw InvalidInputError("atomic measure: atom/weight count mismatch");
  if (atoms.empty()) throw InvalidInputError("atomic measure: empty support");
  const int width = atoms[0].width();
  if (width < 1) throw InvalidInputError("atomic measure: empty tuple atom");
  const SpaceKind k = atoms[0].slots[0].kind();
  for (const Atom& a : atoms) {
    if (a.width() != width)
      throw InvalidInputError("atomic measure: mixed tuple widths");
    for (const Point& p : a.slots)
      if (p.kind() != k)
        throw InvalidInputError("atomic measure: mixed state-space variants");
  }
  for (double w : weights)
    if (!(w >= 0.0))
      throw InvalidInputError("atomic measure: negative or NaN weight");
  const double total = stable_sum(weights);
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidInputError("atomic measure: weights sum to " + std::to_string(total) +
                            ", not 1 within 1e-12");

  // Canonical form: sort by atom order, merge exact duplicates, drop zeros.
  std::vector<std::size_t> idx(atoms.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return atom_less(atoms[i], atoms[j]);
  });
  for (std::size_t pos = 0; pos < idx.size(); ++pos) {
    const Atom& a = atoms[idx[pos]];
    double w = weights[idx[pos]];
    while (pos + 1 < idx.size() && atoms[idx[pos + 1]] == a) {
      ++pos;
      w += weights[idx[pos]];
    }
    if (w > 0.0) {
      atoms_.push_back(a);
      weights_.push_back(w);
    }
  }
  if (atoms_.empty())
    throw InvalidInputError("atomic measure: all weights zero");
}

AtomicMeasure AtomicMeasure::dirac(const Atom& a) {
  return AtomicMeasure({a}, {1.0});
}

AtomicMeasure AtomicMeasure::from_points(const std::vector<Point>& points,
                                         const std::vector<double>& weights) {
  std::vector<Atom> atoms;
  atoms.reserve(points.size());
  for (const Point& p : points) atoms.emplace_back(p);
  return AtomicMeasure(std::move(atoms), weights);
}

int AtomicMeasure::tuple_width() const {
  if (atoms_.empty()) throw InvalidInputError("empty measure");
  return atoms_[0].width();
}

SpaceKind AtomicMeasure::kind() const {
  if (atoms_.empty()) throw InvalidInputError("empty measure");
  return atoms_[0].slots[0].kind();
}

const Point& AtomicMeasure::point_at(int i) const {
  const Atom& a = atoms_[static_cast<std::size_t>(i)];
  if (a.width() != 1)
    throw InvalidInputError("point_at: measure has tuple atoms");
  return a.slots[0];
}

double AtomicMeasure::integrate(const std::function<double(const Atom&)>& f) const {
  std::vector<double> terms(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) terms[i] = weights_[i] * f(atoms_[i]);
  return stable_sum(terms);
}

int AtomicMeasure::sample_index(RandomStream& rng) const {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    if (u < acc) return static_cast<int>(i);
  }
  return support_size() - 1;  // u landed in the rounding slack at the top
}

bool operator==(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.atoms_.size() != b.atoms_.size()) return false;
  for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
    if (!(a.atoms_[i] == b.atoms_[i])) return false;
    if (a.weights_[i] != b.weights_[i]) return false;
  }
  return true;
}

AtomicMeasure product_power(const AtomicMeasure& mu, int k, std::size_t max_atoms) {
  if (k < 1) throw InvalidInputError("product_power: k must be >= 1");
  if (mu.tuple_width() != 1)
    throw InvalidInputError("product_power: base measure must have width-1 atoms");
  const std::size_t m = static_cast<std::size_t>(mu.support_size());
  std::size_t count = 1;
  for (int i = 0; i < k; ++i) {
    count *= m;
    if (count > max_atoms)
      throw CapacityError("product_power: support " + std::to_string(m) + "^" +
                          std::to_string(k) + " exceeds cap " + std::to_string(max_atoms));
  }

  std::vector<Atom> atoms;
  std::vector<double> weights;
  atoms.reserve(count);
  weights.reserve(count);
  std::vector<int> digit(static_cast<std::size_t>(k), 0);
  for (;;) {
    Atom a;
    a.slots.reserve(static_cast<std::size_t>(k));
    double w = 1.0;
    for (int s = 0; s < k; ++s) {
      a.slots.push_back(mu.point_at(digit[static_cast<std::size_t>(s)]));
      w *= mu.weight(digit[static_cast<std::size_t>(s)]);
    }
    atoms.push_back(std::move(a));
    weights.push_back(w);
    int pos = k - 1;
    while (pos >= 0 && ++digit[static_cast<std::size_t>(pos)] == static_cast<int>(m)) {
      digit[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return AtomicMeasure(std::move(atoms), std::move(weights));
}

}  // namespace chaoslab
