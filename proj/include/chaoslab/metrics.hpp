#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "chaoslab/atomic_measure.hpp"

namespace chaoslab {

enum class DistanceMethod { ExactEnumeration, LpSolve, BisectionFlow, MonteCarlo };

std::string distance_method_name(DistanceMethod m);

struct DistanceResult {
  double value = 0.0;
  DistanceMethod method = DistanceMethod::ExactEnumeration;
  // Audit trail: for the exact Dudley solve, the optimal test-function values
  // on the union support (same order as union_support()).
  std::optional<Eigen::VectorXd> witness;
};

struct MetricOptions {
  // Union-support cap for the exact Dudley LP; beyond it the estimate falls
  // back to the fixed bounded-Lipschitz dictionary (method = monte-carlo).
  int bl_exact_cap = 400;
  // Union-support cap for the Levy-Prohorov flow solve; a hard error beyond.
  int lp_cap = 200;
  double lp_tolerance = 1e-9;
};

// Total variation: (1/2) sum over the union support of |mu(a) - nu(a)|.
DistanceResult tv_distance(const AtomicMeasure& mu, const AtomicMeasure& nu);

// Dudley distance BL*: sup over g with sup-norm + Lipschitz constant <= 1 of
// |integral g d(mu - nu)|. Exact mode solves the support LP
//   maximize sum g_i w_i  s.t.  |g_i| <= c, |g_i - g_j| <= L d_ij, c + L <= 1
// with the O(m^2) Lipschitz rows enforced lazily (see linprog.hpp).
DistanceResult bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu,
                           const MetricOptions& options = {});

// Levy-Prohorov distance: inf{delta : some coupling puts mass <= delta on
// pairs with d > delta}, via bisection on delta with a max-flow feasibility
// check (Strassen). Ties resolve upward: the reported value is the smallest
// feasible delta found, a conservative upper estimate within lp_tolerance.
DistanceResult lp_distance(const AtomicMeasure& mu, const AtomicMeasure& nu,
                           const MetricOptions& options = {});

// 2(1 - n!/(n^k (n-k)!)), evaluated in log-space.
double sampling_identity_bound(int n, int k);

// Merged canonical supports with per-measure weights (zero where absent).
struct UnionSupport {
  std::vector<Atom> atoms;
  Eigen::VectorXd mu_weights;
  Eigen::VectorXd nu_weights;
};
UnionSupport union_support(const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace chaoslab
