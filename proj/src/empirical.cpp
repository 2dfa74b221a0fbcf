#include "chaoslab/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "chaoslab/errors.hpp"
#include "chaoslab/random_stream.hpp"

namespace chaoslab {

namespace {

// n * (n-1) * ... * (n-k+1) if it stays within cap, otherwise 0.
std::size_t falling_factorial_capped(int n, int k, std::size_t cap) {
  std::size_t count = 1;
  for (int i = 0; i < k; ++i) {
    const std::size_t factor = static_cast<std::size_t>(n - i);
    if (count > cap / factor) return 0;
    count *= factor;
  }
  return count <= cap ? count : 0;
}

std::size_t power_capped(int n, int k, std::size_t cap) {
  std::size_t count = 1;
  for (int i = 0; i < k; ++i) {
    const std::size_t factor = static_cast<std::size_t>(n);
    if (count > cap / factor) return 0;
    count *= factor;
  }
  return count <= cap ? count : 0;
}

Atom tuple_at(const Configuration& config, const std::vector<int>& index) {
  Atom a;
  a.slots.reserve(index.size());
  for (int i : index) a.slots.push_back(config[i]);
  return a;
}

}  // namespace

AtomicMeasure empirical_measure(const Configuration& config) {
  if (config.n() < 1) throw InvalidInputError("empirical_measure: empty configuration");
  // Count multiplicities first so each weight is a single division by n.
  std::vector<Point> sorted = config.points();
  std::sort(sorted.begin(), sorted.end(), point_less);
  std::vector<Point> atoms;
  std::vector<double> weights;
  const double n = static_cast<double>(config.n());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    atoms.push_back(sorted[i]);
    weights.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  return AtomicMeasure::from_points(atoms, weights);
}

KSampleResult empirical_k_without_replacement(const Configuration& config, int k,
                                              const KSampleOptions& options,
                                              RandomStream* rng) {
  const int n = config.n();
  if (k < 1 || k > n)
    throw InvalidInputError("empirical_k_without_replacement: need 1 <= k <= n");

  const std::size_t count = falling_factorial_capped(n, k, options.enumeration_cap);
  if (count > 0) {
    std::vector<Atom> atoms;
    std::vector<double> weights(count, 1.0 / static_cast<double>(count));
    atoms.reserve(count);
    // Enumerate injections as k-tuples of distinct indices.
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    // Depth-first enumeration without recursion.
    int depth = 0;
    idx[0] = -1;
    while (depth >= 0) {
      // Advance the index at the current depth to the next unused slot.
      int candidate = idx[static_cast<std::size_t>(depth)];
      if (candidate >= 0) used[static_cast<std::size_t>(candidate)] = false;
      ++candidate;
      while (candidate < n && used[static_cast<std::size_t>(candidate)]) ++candidate;
      if (candidate >= n) {
        --depth;
        continue;
      }
      idx[static_cast<std::size_t>(depth)] = candidate;
      used[static_cast<std::size_t>(candidate)] = true;
      if (depth == k - 1) {
        atoms.push_back(tuple_at(config, idx));
      } else {
        ++depth;
        idx[static_cast<std::size_t>(depth)] = -1;
      }
    }
    // Leave the used flags consistent; not needed past this point.
    return {AtomicMeasure(std::move(atoms), std::move(weights)), true};
  }

  if (options.mc_budget == 0)
    throw CapacityError(
        "empirical_k_without_replacement: enumeration cap exceeded and no MC budget declared");
  if (rng == nullptr)
    throw InvalidInputError(
        "empirical_k_without_replacement: Monte Carlo mode needs a random stream");

  std::vector<Atom> atoms;
  atoms.reserve(options.mc_budget);
  std::vector<double> weights(options.mc_budget,
                              1.0 / static_cast<double>(options.mc_budget));
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (std::size_t s = 0; s < options.mc_budget; ++s) {
    // Uniform injection by sequential rejection; k is small relative to n here.
    for (int d = 0; d < k; ++d) {
      for (;;) {
        const int c = static_cast<int>(rng->uniform_below(static_cast<std::uint64_t>(n)));
        bool dup = false;
        for (int e = 0; e < d; ++e)
          if (idx[static_cast<std::size_t>(e)] == c) dup = true;
        if (!dup) {
          idx[static_cast<std::size_t>(d)] = c;
          break;
        }
      }
    }
    atoms.push_back(tuple_at(config, idx));
  }
  return {AtomicMeasure(std::move(atoms), std::move(weights)), false};
}

AtomicMeasure empirical_k_with_replacement(const Configuration& config, int k,
                                           std::size_t enumeration_cap) {
  const int n = config.n();
  if (k < 1 || k > n)
    throw InvalidInputError("empirical_k_with_replacement: need 1 <= k <= n");
  const std::size_t count = power_capped(n, k, enumeration_cap);
  if (count == 0)
    throw CapacityError("empirical_k_with_replacement: n^k exceeds enumeration cap");

  std::vector<Atom> atoms;
  atoms.reserve(count);
  std::vector<double> weights(count, 1.0 / static_cast<double>(count));
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  for (;;) {
    atoms.push_back(tuple_at(config, idx));
    int pos = k - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == n) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return AtomicMeasure(std::move(atoms), std::move(weights));
}

Configuration permute(const Configuration& config, const std::vector<int>& perm) {
  const int n = config.n();
  if (static_cast<int>(perm.size()) != n)
    throw InvalidInputError("permute: permutation length differs from n");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
      throw InvalidInputError("permute: not a permutation of 0..n-1");
    seen[static_cast<std::size_t>(p)] = true;
  }
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(config[perm[static_cast<std::size_t>(i)]]);
  return Configuration(std::move(out));
}

Configuration random_preimage(const AtomicMeasure& mu, int n, RandomStream& rng) {
  if (n < 1) throw InvalidInputError("random_preimage: n must be >= 1");
  if (mu.tuple_width() != 1)
    throw InvalidInputError("random_preimage: measure must have width-1 atoms");
  const double tol = 1e-9 / static_cast<double>(n);
  std::vector<Point> multiset;
  multiset.reserve(static_cast<std::size_t>(n));
  long long total = 0;
  for (int i = 0; i < mu.support_size(); ++i) {
    const double scaled = mu.weight(i) * static_cast<double>(n);
    const double rounded = std::round(scaled);
    if (std::abs(mu.weight(i) - rounded / static_cast<double>(n)) > tol)
      throw InvalidInputError("random_preimage: weight is not a multiple of 1/n");
    const long long copies = static_cast<long long>(rounded);
    total += copies;
    for (long long c = 0; c < copies; ++c) multiset.push_back(mu.point_at(i));
  }
  if (total != n)
    throw InvalidInputError("random_preimage: rounded copies do not total n");

  // Fisher-Yates with the stream's unbiased index draws.
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(multiset[static_cast<std::size_t>(i)], multiset[static_cast<std::size_t>(j)]);
  }
  return Configuration(std::move(multiset));
}

}  // namespace chaoslab
