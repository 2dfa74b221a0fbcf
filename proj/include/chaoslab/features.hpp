#pragma once

#include <string>
#include <vector>

#include "chaoslab/atomic_measure.hpp"

namespace chaoslab {

// Sixteen fixed test functions on the real line, each normalized so that
// sup-norm plus Lipschitz constant is at most 1 (clipped linear ramps,
// Gaussian bumps, trigonometric waves on a bounded window, sigmoid shapes).
// Shared by every estimator that needs bounded-Lipschitz features.
int base_feature_count();
double base_feature(int id, double x);
std::string base_feature_name(int id);

// A feature on a (possibly tuple-valued) atom space: a base function applied
// to one coordinate of one slot, or a scaled indicator for symbol spaces.
// Coordinate projections are 1-Lipschitz for the Euclidean metrics and slot
// projections are 1-Lipschitz for the max tuple metric, so composition keeps
// sup + Lip <= 1; symbol indicators use value 1/2 so sup + oscillation = 1
// under the discrete metric.
struct Feature {
  enum class Kind { Base, SymbolIndicator };
  Kind kind = Kind::Base;
  int slot = 0;
  int coord = 0;      // coordinate within the slot payload (Base only)
  int base_id = 0;    // Base only
  int symbol = 0;     // SymbolIndicator only
  std::string name;

  double operator()(const Atom& a) const;
  double operator()(const Point& p) const;
};

// Dictionary for width-`width` tuples of the given space. `dims` is the
// numeric payload size per slot (1 scalar, 3 velocity3, 2d phase); `symbols`
// lists the alphabet values to build indicators for (Symbol spaces only).
std::vector<Feature> feature_dictionary(SpaceKind kind, int width, int dims,
                                        const std::vector<int>& symbols = {});

// Dictionary sized for the union support of two measures.
std::vector<Feature> feature_dictionary_for(const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace chaoslab
