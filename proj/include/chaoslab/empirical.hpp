#pragma once

#include <cstddef>
#include <vector>

#include "chaoslab/atomic_measure.hpp"
#include "chaoslab/configuration.hpp"

namespace chaoslab {

class RandomStream;

// epsilon_n: (1/n) sum of delta(s_i), canonical coalesced form.
AtomicMeasure empirical_measure(const Configuration& config);

struct KSampleOptions {
  // Enumeration runs when the tuple count (n!/(n-k)! or n^k) stays within cap.
  std::size_t enumeration_cap = 1000000;
  // Monte Carlo fallback budget for the without-replacement construction;
  // 0 means "no budget declared" and a cap overrun becomes a CapacityError.
  std::size_t mc_budget = 0;
};

struct KSampleResult {
  AtomicMeasure measure;
  bool exact = true;  // false: Monte Carlo estimate with options.mc_budget draws
};

// Ordered k-tuples sampled without replacement:
// ((n-k)!/n!) sum over injections i of delta(s_i(1), ..., s_i(k)).
// Enumeration is exact; beyond the cap, with a declared mc_budget and a
// stream, an unbiased Monte Carlo estimate is returned.
KSampleResult empirical_k_without_replacement(const Configuration& config, int k,
                                              const KSampleOptions& options = {},
                                              RandomStream* rng = nullptr);

// Ordered k-tuples with replacement: epsilon_n^(x)k, all n^k index maps.
AtomicMeasure empirical_k_with_replacement(const Configuration& config, int k,
                                           std::size_t enumeration_cap = 1000000);

// Coordinate i of the output is coordinate perm[i] of the input (0-based).
Configuration permute(const Configuration& config, const std::vector<int>& perm);

// Uniformly random ordering of the multiset with n*weight copies of each
// atom. Weights must be integer multiples of 1/n within 1e-9*(1/n).
Configuration random_preimage(const AtomicMeasure& mu, int n, RandomStream& rng);

}  // namespace chaoslab
