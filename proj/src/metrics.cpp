#include "chaoslab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "chaoslab/errors.hpp"
#include "chaoslab/features.hpp"
#include "chaoslab/linprog.hpp"
#include "chaoslab/maxflow.hpp"

namespace chaoslab {

namespace {

void check_same_space(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.kind() != nu.kind())
    throw InvalidInputError("distance: measures over different state-space variants");
  if (mu.tuple_width() != nu.tuple_width())
    throw InvalidInputError("distance: measures over different tuple widths");
  if (mu.atom(0).slots[0].coords().size() != nu.atom(0).slots[0].coords().size())
    throw InvalidInputError("distance: measures over different payload dimensions");
}

Eigen::MatrixXd pairwise_distances(const std::vector<Atom>& atoms) {
  const int m = static_cast<int>(atoms.size());
  Eigen::MatrixXd D(m, m);
  for (int i = 0; i < m; ++i) {
    D(i, i) = 0.0;
    for (int j = i + 1; j < m; ++j) {
      const double d = distance(atoms[static_cast<std::size_t>(i)],
                                atoms[static_cast<std::size_t>(j)]);
      D(i, j) = d;
      D(j, i) = d;
    }
  }
  return D;
}

// Dictionary estimate: max over the fixed feature family of |mu(f) - nu(f)|.
double dictionary_deviation(const UnionSupport& support,
                            const std::vector<Feature>& features) {
  double best = 0.0;
  const int m = static_cast<int>(support.atoms.size());
  for (const Feature& f : features) {
    std::vector<double> terms(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      terms[static_cast<std::size_t>(i)] =
          (support.mu_weights[i] - support.nu_weights[i]) *
          f(support.atoms[static_cast<std::size_t>(i)]);
    best = std::max(best, std::abs(stable_sum(terms)));
  }
  return best;
}

}  // namespace

std::string distance_method_name(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::ExactEnumeration: return "exact-enumeration";
    case DistanceMethod::LpSolve: return "lp-solve";
    case DistanceMethod::BisectionFlow: return "bisection-flow";
    case DistanceMethod::MonteCarlo: return "monte-carlo";
  }
  throw InvalidInputError("unknown distance method");
}

UnionSupport union_support(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  check_same_space(mu, nu);
  UnionSupport out;
  std::vector<double> mw, nw;
  int i = 0, j = 0;
  // Both supports are canonically sorted; merge-walk them.
  while (i < mu.support_size() || j < nu.support_size()) {
    if (j >= nu.support_size() ||
        (i < mu.support_size() && atom_less(mu.atom(i), nu.atom(j)))) {
      out.atoms.push_back(mu.atom(i));
      mw.push_back(mu.weight(i));
      nw.push_back(0.0);
      ++i;
    } else if (i >= mu.support_size() || atom_less(nu.atom(j), mu.atom(i))) {
      out.atoms.push_back(nu.atom(j));
      mw.push_back(0.0);
      nw.push_back(nu.weight(j));
      ++j;
    } else {
      out.atoms.push_back(mu.atom(i));
      mw.push_back(mu.weight(i));
      nw.push_back(nu.weight(j));
      ++i;
      ++j;
    }
  }
  out.mu_weights = Eigen::Map<Eigen::VectorXd>(mw.data(), static_cast<Eigen::Index>(mw.size()));
  out.nu_weights = Eigen::Map<Eigen::VectorXd>(nw.data(), static_cast<Eigen::Index>(nw.size()));
  return out;
}

DistanceResult tv_distance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  const UnionSupport support = union_support(mu, nu);
  std::vector<double> terms(static_cast<std::size_t>(support.atoms.size()));
  for (std::size_t a = 0; a < terms.size(); ++a)
    terms[a] = std::abs(support.mu_weights[static_cast<Eigen::Index>(a)] -
                        support.nu_weights[static_cast<Eigen::Index>(a)]);
  DistanceResult out;
  out.value = 0.5 * stable_sum(terms);
  out.method = DistanceMethod::ExactEnumeration;
  return out;
}

DistanceResult bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu,
                           const MetricOptions& options) {
  const UnionSupport support = union_support(mu, nu);
  const int m = static_cast<int>(support.atoms.size());

  if (m > options.bl_exact_cap) {
    DistanceResult out;
    out.value = dictionary_deviation(support, feature_dictionary_for(mu, nu));
    out.method = DistanceMethod::MonteCarlo;
    return out;
  }

  const Eigen::VectorXd w = support.mu_weights - support.nu_weights;
  const Eigen::MatrixXd D = pairwise_distances(support.atoms);

  // Variables x = (h_0..h_{m-1}, c, L) >= 0 with h_i = g_i + c. The weights
  // sum to zero, so the shift leaves the objective alone while it turns the
  // lower box rows -g_i <= c into plain nonnegativity: the solver sees m
  // fewer rows and needs no free-variable split.
  const int nvars = m + 2;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(nvars);
  obj.head(m) = w;

  struct Row {
    int i, j;     // h_i - h_j <= L d_ij; j < 0 encodes box/budget rows
    int kind;     // 0 pair, 1 box (h_i <= 2c), 3 budget
    bool pinned;  // never retired: seeds, and pairs that re-violated once
  };
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(2 * m + 1));
  for (int i = 0; i < m; ++i) rows.push_back({i, -1, 1, true});
  rows.push_back({-1, -1, 3, true});

  // Seed the Lipschitz working set with adjacent pairs along every
  // coordinate; on the line these already imply every other pair, and on
  // wider spaces they leave little for the lazy rounds to discover.
  if (m > 1) {
    const std::size_t width = support.atoms[0].slots.size();
    std::vector<int> order(static_cast<std::size_t>(m));
    std::set<std::pair<int, int>> seeded;
    for (std::size_t s = 0; s < width; ++s) {
      const Eigen::Index dims = support.atoms[0].slots[s].coords().size();
      for (Eigen::Index cc = 0; cc < dims; ++cc) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
          return support.atoms[static_cast<std::size_t>(a)].slots[s].coords()[cc] <
                 support.atoms[static_cast<std::size_t>(b)].slots[s].coords()[cc];
        });
        for (int t = 0; t + 1 < m; ++t) {
          const int a = order[static_cast<std::size_t>(t)];
          const int b = order[static_cast<std::size_t>(t + 1)];
          if (seeded.insert({a, b}).second) rows.push_back({a, b, 0, true});
          if (seeded.insert({b, a}).second) rows.push_back({b, a, 0, true});
        }
      }
    }
  }

  auto assemble = [&](Eigen::MatrixXd& A, Eigen::VectorXd& b) {
    const int R = static_cast<int>(rows.size());
    A = Eigen::MatrixXd::Zero(R, nvars);
    b = Eigen::VectorXd::Zero(R);
    for (int r = 0; r < R; ++r) {
      const Row& row = rows[static_cast<std::size_t>(r)];
      switch (row.kind) {
        case 0:
          A(r, row.i) = 1.0;
          A(r, row.j) = -1.0;
          A(r, m + 1) = -D(row.i, row.j);
          break;
        case 1:
          A(r, row.i) = 1.0;
          A(r, m) = -2.0;
          break;
        case 3:
          A(r, m) = 1.0;
          A(r, m + 1) = 1.0;
          b[r] = 1.0;
          break;
      }
    }
  };

  constexpr double kViolationTol = 1e-9;
  constexpr double kDropTol = 1e-3;
  constexpr int kMaxRounds = 200;
  std::set<std::pair<int, int>> retired;
  LinProgResult sol;
  for (int round = 0; round < kMaxRounds; ++round) {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    assemble(A, b);
    sol = maximize_nonneg(obj, A, b);
    if (sol.status != LinProgStatus::Optimal)
      throw Error("bl_distance: LP reported unbounded, which cannot happen");

    const Eigen::VectorXd& x = sol.x;
    const double L = x[m + 1];
    struct Violation {
      double amount;
      int i, j;
    };
    std::vector<Violation> violations;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        const double v = x[i] - x[j] - L * D(i, j);
        if (v > kViolationTol) violations.push_back({v, i, j});
      }
    if (violations.empty()) break;

    // Retire generated rows that have gone clearly slack; without this the
    // tableau can grow by O(m) rows per round. The final round's solution is
    // feasible for every pair, so retiring never compromises the optimum. A
    // retired pair that turns violated again is re-added pinned, which rules
    // out drop/re-add cycles and keeps termination guaranteed.
    std::vector<Row> kept;
    kept.reserve(rows.size());
    for (const Row& row : rows) {
      const double slack =
          row.kind == 0 ? L * D(row.i, row.j) - (x[row.i] - x[row.j]) : 0.0;
      if (row.pinned || slack <= kDropTol)
        kept.push_back(row);
      else
        retired.insert({row.i, row.j});
    }
    rows.swap(kept);

    std::sort(violations.begin(), violations.end(),
              [](const Violation& a, const Violation& b) { return a.amount > b.amount; });
    const std::size_t take = std::min(violations.size(), static_cast<std::size_t>(
                                                             std::max(64, 2 * m)));
    for (std::size_t t = 0; t < take; ++t) {
      const bool again = retired.erase({violations[t].i, violations[t].j}) > 0;
      rows.push_back({violations[t].i, violations[t].j, 0, again});
    }
    if (round == kMaxRounds - 1)
      throw Error("bl_distance: constraint generation did not converge");
  }

  DistanceResult out;
  out.value = std::max(0.0, sol.objective);
  out.method = DistanceMethod::LpSolve;
  out.witness = (sol.x.head(m).array() - sol.x[m]).matrix();
  return out;
}

DistanceResult lp_distance(const AtomicMeasure& mu, const AtomicMeasure& nu,
                           const MetricOptions& options) {
  const UnionSupport support = union_support(mu, nu);
  if (static_cast<int>(support.atoms.size()) > options.lp_cap)
    throw CapacityError("lp_distance: union support exceeds cap " +
                        std::to_string(options.lp_cap));

  const int p = mu.support_size();
  const int q = nu.support_size();
  Eigen::MatrixXd cross(p, q);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) cross(i, j) = distance(mu.atom(i), nu.atom(j));

  const auto feasible = [&](double delta) {
    // Strassen check: is there a coupling with mass <= delta on pairs
    // farther apart than delta? Equivalently 1 - (max mass matched within
    // delta) <= delta.
    MaxFlowGraph graph(p + q + 2);
    const int source = 0, sink = p + q + 1;
    for (int i = 0; i < p; ++i) graph.add_edge(source, 1 + i, mu.weight(i));
    for (int j = 0; j < q; ++j) graph.add_edge(1 + p + j, sink, nu.weight(j));
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < q; ++j)
        if (cross(i, j) <= delta + 1e-15) graph.add_edge(1 + i, 1 + p + j, 2.0);
    const double matched = graph.run(source, sink);
    return 1.0 - matched <= delta + 1e-12;
  };

  double lo = 0.0, hi = 1.0;
  if (feasible(0.0)) hi = 0.0;
  while (hi - lo > options.lp_tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  DistanceResult out;
  out.value = hi;
  out.method = DistanceMethod::BisectionFlow;
  return out;
}

double sampling_identity_bound(int n, int k) {
  if (k < 1 || k > n) throw InvalidInputError("sampling_identity_bound: need 1 <= k <= n");
  // ratio = n! / (n^k (n-k)!) = prod_{i<k} (n-i)/n. The direct product is
  // exact at k = 1 (the bound is then exactly 0); fall back to lgamma only
  // when k is large enough for the loop to matter.
  double ratio;
  if (k <= 64) {
    ratio = 1.0;
    for (int i = 0; i < k; ++i) ratio *= static_cast<double>(n - i) / static_cast<double>(n);
  } else {
    ratio = std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                     std::lgamma(static_cast<double>(n - k) + 1.0) -
                     static_cast<double>(k) * std::log(static_cast<double>(n)));
  }
  return std::max(0.0, 2.0 * (1.0 - std::min(1.0, ratio)));
}

}  // namespace chaoslab
