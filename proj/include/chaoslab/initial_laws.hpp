#pragma once

#include <string>
#include <vector>

#include "chaoslab/atomic_measure.hpp"
#include "chaoslab/configuration.hpp"
#include "chaoslab/random_stream.hpp"

namespace chaoslab {

// Inverse standard normal CDF (rational approximation polished by one Halley
// step of the exact erfc expression; absolute error well below 1e-13).
double normal_quantile(double u);

// Single-particle laws selected by config strings.
//   gaussian            standard normal on the line
//   uniform(w)          uniform on [-w, w], default w = 1
//   bernoulli(p)        symbol 1 with probability p, else symbol 0
//   bernoulli-1-over-n  bernoulli with p = 1/n, n = the configuration size
//   gaussian3           standard normal velocity in 3 dimensions
//   phase-gaussian(d)   standard normal position and velocity, d each
struct SingleParticleLaw {
  enum class Kind { Gaussian, Uniform, Bernoulli, BernoulliOverN, Gaussian3, PhaseGaussian };
  Kind kind = Kind::Gaussian;
  double param = 1.0;  // uniform half-width or bernoulli p
  int dim = 1;         // phase dimension

  SpaceKind space() const;
  // n is the configuration size the draw belongs to (read only by the
  // 1/n bernoulli).
  Point sample(RandomStream& rng, int n) const;
  // Scalar kinds only: the quantile function, used for deterministic
  // configuration ladders.
  double quantile(double u) const;
  // Atomic stand-in for the law: exact for symbol laws, an m-point quantile
  // (or fixed-draw) quantization otherwise.
  AtomicMeasure quantized(int m, int n) const;
  std::string describe() const;
  static SingleParticleLaw parse(const std::string& text);
};

// n-particle initial laws for sweeps.
//   product(law)        i.i.d. coordinates
//   pure-atomic(law)    the deterministic configuration s_n with
//                       empirical_measure(s_n) -> law: mid-quantiles for
//                       scalar laws, rounded symbol counts for symbol laws,
//                       a fixed i.i.d.-prefix stream otherwise
//   mixture(l1:w1,...)  pick one component per replica, then draw i.i.d.
//                       from it (exchangeable but not chaotic; negative
//                       tests)
struct InitialLaw {
  enum class Family { Product, PureAtomic, Mixture };
  Family family = Family::Product;
  SingleParticleLaw marginal;
  std::vector<SingleParticleLaw> components;
  std::vector<double> weights;

  SpaceKind space() const;
  Configuration draw(int n, RandomStream& rng) const;
  std::string describe() const;
  static InitialLaw parse(const std::string& text);
};

}  // namespace chaoslab
