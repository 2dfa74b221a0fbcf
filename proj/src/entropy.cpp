#include "chaoslab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "chaoslab/atomic_measure.hpp"
#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

bool valid_composition(const std::vector<int>& j, int n, int k) {
  if (static_cast<int>(j.size()) != k) return false;
  long long total = 0;
  for (int c : j) {
    if (c < 0) return false;
    total += c;
  }
  return total == n;
}

void check_simplex_point(const Eigen::VectorXd& p) {
  if (p.size() < 1) throw InvalidInputError("simplex point is empty");
  if ((p.array() < -1e-15).any())
    throw InvalidInputError("simplex point has a negative entry");
  if (std::abs(p.sum() - 1.0) > 1e-9)
    throw InvalidInputError("simplex point entries must sum to 1");
}

void for_each_composition(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> j(static_cast<std::size_t>(k), 0);
  const std::function<void(int, int)> rec = [&](int slot, int left) {
    if (slot == k - 1) {
      j[static_cast<std::size_t>(slot)] = left;
      fn(j);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      j[static_cast<std::size_t>(slot)] = c;
      rec(slot + 1, left - c);
    }
  };
  rec(0, n);
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

OccupancyLaw::OccupancyLaw(int n, int k, std::map<std::vector<int>, double> table)
    : n_(n), k_(k), table_(std::move(table)) {
  if (n_ < 1) throw InvalidInputError("occupancy law needs n >= 1");
  if (k_ < 1) throw InvalidInputError("occupancy law needs a nonempty alphabet");
  std::vector<double> masses;
  masses.reserve(table_.size());
  for (auto it = table_.begin(); it != table_.end();) {
    if (!valid_composition(it->first, n_, k_))
      throw InvalidInputError("occupancy table key is not a composition of n");
    if (it->second < -1e-15) throw InvalidInputError("occupancy table has a negative probability");
    if (it->second <= 0.0) {
      it = table_.erase(it);
      continue;
    }
    masses.push_back(it->second);
    ++it;
  }
  if (std::abs(stable_sum(masses) - 1.0) > 1e-12)
    throw InvalidInputError("occupancy table mass must sum to 1");
}

OccupancyLaw OccupancyLaw::product(int n, const Eigen::VectorXd& p) {
  check_simplex_point(p);
  if (n < 1) throw InvalidInputError("occupancy law needs n >= 1");
  const int k = static_cast<int>(p.size());
  std::map<std::vector<int>, double> table;
  for_each_composition(n, k, [&](const std::vector<int>& j) {
    double lw = log_multinomial(n, j);
    for (int i = 0; i < k; ++i) {
      const int c = j[static_cast<std::size_t>(i)];
      if (c == 0) continue;
      if (p(i) <= 0.0) return;  // composition unreachable
      lw += c * std::log(p(i));
    }
    const double w = std::exp(lw);
    if (w > 0.0) table.emplace(j, w);
  });
  return OccupancyLaw(n, k, std::move(table));
}

OccupancyLaw OccupancyLaw::point_mass(std::vector<int> j) {
  int n = 0;
  for (int c : j) n += c;
  const int k = static_cast<int>(j.size());
  std::map<std::vector<int>, double> table;
  table.emplace(std::move(j), 1.0);
  return OccupancyLaw(n, k, std::move(table));
}

OccupancyLaw OccupancyLaw::mixture(const std::vector<OccupancyLaw>& parts,
                                   const std::vector<double>& weights) {
  if (parts.empty() || parts.size() != weights.size())
    throw InvalidInputError("mixture needs matching nonempty parts and weights");
  double total = 0.0;
  for (double w : weights) {
    if (w <= 0.0) throw InvalidInputError("mixture weights must be positive");
    total += w;
  }
  std::map<std::vector<int>, double> table;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    if (parts[c].n() != parts[0].n() || parts[c].k() != parts[0].k())
      throw InvalidInputError("mixture parts must share n and alphabet");
    for (const auto& [j, w] : parts[c].table()) table[j] += weights[c] / total * w;
  }
  return OccupancyLaw(parts[0].n(), parts[0].k(), std::move(table));
}

std::vector<int> occupancy_counts(const Configuration& config, int k) {
  if (config.kind() != SpaceKind::Symbol)
    throw InvalidInputError("occupancy counts need a symbol configuration");
  if (k < 1) throw InvalidInputError("occupancy counts need a nonempty alphabet");
  std::vector<int> j(static_cast<std::size_t>(k), 0);
  for (int s : config.symbols()) {
    if (s < 0 || s >= k) throw InvalidInputError("symbol outside the alphabet");
    ++j[static_cast<std::size_t>(s)];
  }
  return j;
}

double log_multinomial(int n, const std::vector<int>& j) {
  if (!valid_composition(j, n, static_cast<int>(j.size())))
    throw InvalidInputError("log multinomial needs a composition of n");
  double value = std::lgamma(static_cast<double>(n) + 1.0);
  for (int c : j) value -= std::lgamma(static_cast<double>(c) + 1.0);
  return value;
}

double pointwise_probability(const OccupancyLaw& law, const Configuration& config) {
  if (config.n() != law.n())
    throw InvalidInputError("configuration size does not match the occupancy law");
  const std::vector<int> j = occupancy_counts(config, law.k());
  const auto it = law.table().find(j);
  if (it == law.table().end()) return 0.0;
  return std::exp(std::log(it->second) - log_multinomial(law.n(), j));
}

SimplexMeasure simplex_pushforward(const OccupancyLaw& law) {
  SimplexMeasure out;
  out.atoms.reserve(law.table().size());
  out.weights.reserve(law.table().size());
  for (const auto& [j, w] : law.table()) {
    Eigen::VectorXd atom(law.k());
    for (int i = 0; i < law.k(); ++i)
      atom(i) = static_cast<double>(j[static_cast<std::size_t>(i)]) / law.n();
    out.atoms.push_back(std::move(atom));
    out.weights.push_back(w);
  }
  return out;
}

double specific_entropy(const OccupancyLaw& law) {
  std::vector<double> terms;
  terms.reserve(law.table().size());
  for (const auto& [j, w] : law.table())
    terms.push_back(w * (log_multinomial(law.n(), j) - std::log(w)));
  return stable_sum(terms) / law.n();
}

RelativeEntropyResult relative_entropy(const Eigen::VectorXd& mu, const Eigen::VectorXd& pi) {
  if (mu.size() != pi.size()) throw InvalidInputError("relative entropy needs one alphabet");
  if ((mu.array() < -1e-15).any() || (pi.array() < -1e-15).any())
    throw InvalidInputError("relative entropy needs nonnegative laws");
  if (std::abs(mu.sum() - 1.0) > 1e-9 || std::abs(pi.sum() - 1.0) > 1e-9)
    throw InvalidInputError("relative entropy needs probability vectors");
  RelativeEntropyResult out;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) <= 0.0) continue;
    if (pi(i) <= 0.0) {
      out.minus_infinity = true;
      return out;
    }
    terms.push_back(-mu(i) * std::log(mu(i) / pi(i)));
  }
  out.value = stable_sum(terms);
  return out;
}

OccupancyFamily product_family(const Eigen::VectorXd& p) {
  check_simplex_point(p);
  return [p](int n) { return OccupancyLaw::product(n, p); };
}

OccupancyFamily pure_atomic_family(const Eigen::VectorXd& p) {
  check_simplex_point(p);
  return [p](int n) {
    if (n < 1) throw InvalidInputError("occupancy law needs n >= 1");
    const int k = static_cast<int>(p.size());
    std::vector<int> j(static_cast<std::size_t>(k), 0);
    std::vector<std::pair<double, int>> remainder;
    int assigned = 0;
    for (int i = 0; i < k; ++i) {
      const double share = p(i) * n;
      j[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(share));
      assigned += j[static_cast<std::size_t>(i)];
      remainder.emplace_back(-(share - std::floor(share)), i);
    }
    std::sort(remainder.begin(), remainder.end());
    for (int extra = 0; extra < n - assigned; ++extra)
      ++j[static_cast<std::size_t>(remainder[static_cast<std::size_t>(extra)].second)];
    return OccupancyLaw::point_mass(std::move(j));
  };
}

namespace {

Eigen::Vector2d bernoulli_simplex(const SingleParticleLaw& law, int n) {
  const double p = law.kind == SingleParticleLaw::Kind::Bernoulli
                       ? law.param
                       : 1.0 / static_cast<double>(n);
  return Eigen::Vector2d(1.0 - p, p);
}

bool is_bernoulli(const SingleParticleLaw& law) {
  return law.kind == SingleParticleLaw::Kind::Bernoulli ||
         law.kind == SingleParticleLaw::Kind::BernoulliOverN;
}

}  // namespace

OccupancyFamily occupancy_family(const InitialLaw& law) {
  if (law.space() != SpaceKind::Symbol)
    throw InvalidInputError("occupancy families need a finite symbol law: " + law.describe());
  switch (law.family) {
    case InitialLaw::Family::Product:
      if (!is_bernoulli(law.marginal)) break;
      return [m = law.marginal](int n) {
        return OccupancyLaw::product(n, bernoulli_simplex(m, n));
      };
    case InitialLaw::Family::PureAtomic:
      if (!is_bernoulli(law.marginal)) break;
      // Same counts the deterministic configuration uses.
      return [m = law.marginal](int n) {
        if (n < 1) throw InvalidInputError("occupancy law needs n >= 1");
        const double p = bernoulli_simplex(m, n)(1);
        const int ones = static_cast<int>(std::llround(p * n));
        return OccupancyLaw::point_mass({n - ones, ones});
      };
    case InitialLaw::Family::Mixture: {
      for (const auto& c : law.components)
        if (!is_bernoulli(c)) throw InvalidInputError("mixture component has no occupancy form");
      return [components = law.components, weights = law.weights](int n) {
        std::vector<OccupancyLaw> parts;
        parts.reserve(components.size());
        for (const auto& c : components)
          parts.push_back(OccupancyLaw::product(n, bernoulli_simplex(c, n)));
        return OccupancyLaw::mixture(parts, weights);
      };
    }
  }
  throw InvalidInputError("no occupancy form for " + law.describe());
}

EntropyTable entropy_convergence_check(const OccupancyFamily& family, const Eigen::VectorXd& p,
                                       const std::vector<int>& n_ladder) {
  check_simplex_point(p);
  EntropyTable out;
  out.p = p;
  std::vector<double> target_terms;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) target_terms.push_back(-p(i) * std::log(p(i)));
  out.target = stable_sum(target_terms);

  for (int n : n_ladder) {
    EntropyRow row;
    row.n = n;
    try {
      const OccupancyLaw law = family(n);
      if (law.n() != n) throw InvalidInputError("family produced a law of the wrong size");
      if (law.k() != static_cast<int>(p.size()))
        throw InvalidInputError("family alphabet does not match the simplex point");
      row.specific = specific_entropy(law);
      row.gap = std::abs(row.specific - out.target);
      std::vector<double> conc;
      conc.reserve(law.table().size());
      for (const auto& [j, w] : law.table()) {
        double tv = 0.0;
        for (int i = 0; i < law.k(); ++i)
          tv += std::abs(static_cast<double>(j[static_cast<std::size_t>(i)]) / n - p(i));
        conc.push_back(w * 0.5 * tv);
      }
      row.concentration = stable_sum(conc);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    out.rows.push_back(std::move(row));
  }

  double envelope = 0.0;
  const EntropyRow* first_ok = nullptr;
  const EntropyRow* last_ok = nullptr;
  for (const EntropyRow& row : out.rows) {
    if (row.failed) continue;
    if (row.n >= 2) envelope = std::max(envelope, row.gap * row.n / std::log(row.n));
    if (first_ok == nullptr) first_ok = &row;
    last_ok = &row;
  }
  out.envelope_constant = envelope;
  out.concentration_ok =
      last_ok != nullptr && (last_ok->concentration <= 0.02 ||
                             last_ok->concentration <= 0.5 * first_ok->concentration);
  return out;
}

std::string entropy_table_csv(const EntropyTable& table) {
  std::ostringstream os;
  os << "n,specific_entropy,target,gap\n";
  for (const EntropyRow& row : table.rows) {
    if (row.failed) continue;
    os << row.n << ',' << format_g(row.specific) << ',' << format_g(table.target) << ','
       << format_g(row.gap) << '\n';
  }
  return os.str();
}

}  // namespace chaoslab
