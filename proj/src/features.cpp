#include "chaoslab/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

// exp(-1/2), the Lipschitz constant of the unit Gaussian bump.
const double kGaussLip = std::exp(-0.5);

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

int base_feature_count() { return 16; }

double base_feature(int id, double x) {
  switch (id) {
    case 0:  return clamp1(x) / 2.0;                                   // sup 1, Lip 1
    case 1:  return clamp1(x / 2.0) / 1.5;                             // sup 1, Lip 1/2
    case 2:  return clamp1(x / 4.0) / 1.25;                            // sup 1, Lip 1/4
    case 3:  return std::min(std::abs(x), 1.0) / 2.0;                  // sup 1, Lip 1
    case 4:  return std::exp(-0.5 * (x + 2.0) * (x + 2.0)) / (1.0 + kGaussLip);
    case 5:  return std::exp(-0.5 * (x + 0.5) * (x + 0.5)) / (1.0 + kGaussLip);
    case 6:  return std::exp(-0.5 * (x - 0.5) * (x - 0.5)) / (1.0 + kGaussLip);
    case 7:  return std::exp(-0.5 * (x - 2.0) * (x - 2.0)) / (1.0 + kGaussLip);
    case 8:  return std::sin(0.7 * x) / 1.7;                           // sup 1, Lip 0.7
    case 9:  return std::cos(0.7 * x) / 1.7;
    case 10: return std::sin(1.3 * x) / 2.3;
    case 11: return std::cos(1.3 * x) / 2.3;
    case 12: return std::tanh(x) / 2.0;                                // sup 1, Lip 1
    case 13: return x * std::exp(-0.5 * x * x) / (1.0 + kGaussLip);    // sup e^-1/2, Lip 1
    case 14: return std::exp(-x * x / 8.0) / (1.0 + 0.5 * kGaussLip);  // sup 1, Lip e^-1/2/2
    case 15: return std::sin(0.4 * x) / 1.4;
  }
  throw InvalidInputError("base_feature: id out of range");
}

std::string base_feature_name(int id) {
  static const char* names[16] = {
      "clip(x)",       "clip(x/2)",    "clip(x/4)",    "min(|x|,1)",
      "gauss(-2)",     "gauss(-0.5)",  "gauss(+0.5)",  "gauss(+2)",
      "sin(0.7x)",     "cos(0.7x)",    "sin(1.3x)",    "cos(1.3x)",
      "tanh(x)",       "x*gauss(x)",   "gauss-wide",   "sin(0.4x)"};
  if (id < 0 || id >= 16) throw InvalidInputError("base_feature_name: id out of range");
  return names[id];
}

double Feature::operator()(const Point& p) const {
  if (kind == Kind::SymbolIndicator)
    return p.symbol_value() == symbol ? 0.5 : 0.0;
  return base_feature(base_id, p.coords()[coord]);
}

double Feature::operator()(const Atom& a) const {
  return (*this)(a.slots[static_cast<std::size_t>(slot)]);
}

std::vector<Feature> feature_dictionary(SpaceKind kind, int width, int dims,
                                        const std::vector<int>& symbols) {
  std::vector<Feature> out;
  if (kind == SpaceKind::Symbol) {
    for (int s = 0; s < width; ++s)
      for (int a : symbols) {
        Feature f;
        f.kind = Feature::Kind::SymbolIndicator;
        f.slot = s;
        f.symbol = a;
        f.name = "slot" + std::to_string(s) + ":ind(" + std::to_string(a) + ")/2";
        out.push_back(f);
      }
    return out;
  }
  for (int s = 0; s < width; ++s)
    for (int c = 0; c < dims; ++c)
      for (int id = 0; id < base_feature_count(); ++id) {
        Feature f;
        f.kind = Feature::Kind::Base;
        f.slot = s;
        f.coord = c;
        f.base_id = id;
        f.name = "slot" + std::to_string(s) + ":x" + std::to_string(c) + ":" +
                 base_feature_name(id);
        out.push_back(f);
      }
  return out;
}

std::vector<Feature> feature_dictionary_for(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.kind() != nu.kind() || mu.tuple_width() != nu.tuple_width())
    throw InvalidInputError("feature dictionary: measures from different spaces");
  const SpaceKind kind = mu.kind();
  const int width = mu.tuple_width();
  if (kind == SpaceKind::Symbol) {
    std::set<int> alphabet;
    for (const Atom& a : mu.atoms())
      for (const Point& p : a.slots) alphabet.insert(p.symbol_value());
    for (const Atom& a : nu.atoms())
      for (const Point& p : a.slots) alphabet.insert(p.symbol_value());
    return feature_dictionary(kind, width, 1,
                              std::vector<int>(alphabet.begin(), alphabet.end()));
  }
  const int dims = static_cast<int>(mu.atom(0).slots[0].coords().size());
  const int nu_dims = static_cast<int>(nu.atom(0).slots[0].coords().size());
  if (dims != nu_dims)
    throw InvalidInputError("feature dictionary: payload dimensions differ");
  return feature_dictionary(kind, width, dims);
}

}  // namespace chaoslab
