#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chaoslab/configuration.hpp"
#include "chaoslab/initial_laws.hpp"

namespace chaoslab {

// Symmetric law on a finite alphabet {0,...,k-1}^n, stored through its
// occupancy counts: table maps compositions j (j_i >= 0, sum j_i = n) to
// probabilities. Only compositions with positive mass are kept; the masses
// must sum to 1 within 1e-12.
class OccupancyLaw {
 public:
  OccupancyLaw(int n, int k, std::map<std::vector<int>, double> table);

  int n() const { return n_; }
  int k() const { return k_; }
  const std::map<std::vector<int>, double>& table() const { return table_; }

  // Multinomial(n, p): the occupancy law of n i.i.d. p-distributed symbols.
  static OccupancyLaw product(int n, const Eigen::VectorXd& p);
  // Point mass at one composition.
  static OccupancyLaw point_mass(std::vector<int> j);
  // Convex combination of laws sharing (n, k); weights normalized.
  static OccupancyLaw mixture(const std::vector<OccupancyLaw>& parts,
                              const std::vector<double>& weights);

 private:
  int n_;
  int k_;
  std::map<std::vector<int>, double> table_;
};

// Composition of a symbol configuration: j_i = #{coordinates equal to i}.
std::vector<int> occupancy_counts(const Configuration& config, int k);

// log of n! / (j_1! ... j_k!), computed in log space so n up to 1e5 stays
// finite.
double log_multinomial(int n, const std::vector<int>& j);

// Probability of one configuration under the symmetric law: every ordering
// of a composition carries the same mass P(j) / multinomial(n; j).
double pointwise_probability(const OccupancyLaw& law, const Configuration& config);

// Image of an occupancy law on the simplex: atom j/n with weight P(j).
struct SimplexMeasure {
  std::vector<Eigen::VectorXd> atoms;
  std::vector<double> weights;
};
SimplexMeasure simplex_pushforward(const OccupancyLaw& law);

// Entropy per coordinate, -(1/n) sum_x rho(x) log rho(x), evaluated over
// compositions only:
//   (1/n) [ -sum_j P log P + sum_j P log multinomial(n; j) ].
double specific_entropy(const OccupancyLaw& law);

// -sum_i mu_i log(mu_i / pi_i), natural log, 0 log 0 = 0. Nonpositive, zero
// exactly when mu = pi; minus_infinity set when mu charges a pi-null symbol
// (value is meaningless then).
struct RelativeEntropyResult {
  double value = 0.0;
  bool minus_infinity = false;
};
RelativeEntropyResult relative_entropy(const Eigen::VectorXd& mu, const Eigen::VectorXd& pi);

using OccupancyFamily = std::function<OccupancyLaw(int)>;

// The n-indexed occupancy families the convergence check consumes.
OccupancyFamily product_family(const Eigen::VectorXd& p);
// Deterministic single-composition family: counts apportioned by largest
// remainder (ties to the lower symbol), so p = (1/2, 1/2) gives
// (ceil(n/2), floor(n/2)).
OccupancyFamily pure_atomic_family(const Eigen::VectorXd& p);
// Family matching an initial law on symbols, so drawn configurations and
// the occupancy table agree by construction. Product and pure-atomic
// bernoulli variants plus mixtures of bernoulli products are supported.
OccupancyFamily occupancy_family(const InitialLaw& law);

struct EntropyRow {
  int n = 0;
  double specific = 0.0;
  double gap = 0.0;            // |specific - target|
  double concentration = 0.0;  // sum_j P(j) tv(j/n, p)
  bool failed = false;
  std::string error;
};

struct EntropyTable {
  Eigen::VectorXd p;
  double target = 0.0;            // -sum p_i log p_i
  std::vector<EntropyRow> rows;
  double envelope_constant = 0.0;  // smallest C with gap <= C log(n)/n on the ladder
  // Simplex concentration consistent with convergence to delta_p: the mean
  // tv distance of pushforward atoms to p either ends tiny or at most half
  // of its first value. A false here marks the family as not p-chaotic.
  bool concentration_ok = false;
};

// Evaluates specific entropy along an n-ladder against the target -sum p log p.
// A generator failure at one n is recorded in that row; the sweep continues.
EntropyTable entropy_convergence_check(const OccupancyFamily& family, const Eigen::VectorXd& p,
                                       const std::vector<int>& n_ladder);

// Rows as "n,specific_entropy,target,gap" lines; failed rows are omitted.
std::string entropy_table_csv(const EntropyTable& table);

}  // namespace chaoslab
