#include "chaoslab/diagnostics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>
#include <utility>

#include "chaoslab/empirical.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/meanfield.hpp"
#include "chaoslab/random_stream.hpp"

namespace chaoslab {

namespace {

constexpr int kRunTag = 0;
constexpr int kPairTag = 1;
constexpr int kMarginalTagBase = 1;  // tag for k-marginals is 1 + k

std::vector<Point> sorted_points(const Configuration& config) {
  std::vector<Point> pts = config.points();
  std::sort(pts.begin(), pts.end(), point_less);
  return pts;
}

// Mean with an all-equal short circuit: ensembles whose samples coincide
// replica for replica must difference out exactly in the covariance
// estimate, and R rounding steps of summation would leave an ulp behind.
double mean_of(const std::vector<double>& xs) {
  const bool all_equal = std::all_of(xs.begin(), xs.end(),
                                     [&](double x) { return x == xs.front(); });
  if (all_equal) return xs.front();
  return stable_sum(xs) / static_cast<double>(xs.size());
}

// Standard error of the mean from the sample variance.
double mean_stderr(const std::vector<double>& xs, double mean) {
  const std::size_t r = xs.size();
  if (r < 2) return 0.0;
  std::vector<double> sq(r);
  for (std::size_t i = 0; i < r; ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);
  return std::sqrt(stable_sum(sq) / (static_cast<double>(r) * static_cast<double>(r - 1)));
}

void check_ensemble(const ReplicaEnsemble& ensemble, const char* who) {
  if (ensemble.replica_count() < 2) {
    throw InvalidInputError(std::string(who) + ": need at least 2 replicas");
  }
  if (ensemble.n < 1) throw InvalidInputError(std::string(who) + ": empty configurations");
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::uint64_t sweep_substream(std::uint64_t cell, int tag, int replica) {
  if (replica < 0 || replica >= (1 << 20)) {
    throw InvalidInputError("sweep_substream: replica index out of range");
  }
  if (tag < 0 || tag >= 16) throw InvalidInputError("sweep_substream: bad role tag");
  return (cell << 24) | (static_cast<std::uint64_t>(tag) << 20) |
         static_cast<std::uint64_t>(replica);
}

ReplicaEnsemble ReplicaEnsemble::wrap(std::vector<Configuration> runs, std::string kernel_kind,
                                      double t, std::uint64_t seed_base, std::uint64_t cell) {
  if (runs.size() < 2) throw InvalidInputError("replica ensemble needs at least 2 runs");
  const int n = runs.front().n();
  if (n < 1) throw InvalidInputError("replica ensemble needs nonempty configurations");
  const SpaceKind kind = runs.front().kind();
  const int dim = kind == SpaceKind::Phase ? runs.front().phase_dim() : 0;
  for (const Configuration& c : runs) {
    if (c.n() != n) throw InvalidInputError("replica ensemble mixes particle counts");
    if (c.kind() != kind || (kind == SpaceKind::Phase && c.phase_dim() != dim)) {
      throw InvalidInputError("replica ensemble mixes point variants");
    }
  }
  ReplicaEnsemble e;
  e.runs = std::move(runs);
  e.kernel_kind = std::move(kernel_kind);
  e.t = t;
  e.n = n;
  e.seed_base = seed_base;
  e.cell = cell;
  return e;
}

ReplicaEnsemble make_replica_ensemble(const TransitionKernel& kernel, const InitialLaw& initial,
                                      int n, double t, int replicas, std::uint64_t seed,
                                      std::uint64_t cell, int threads) {
  if (replicas < 2) throw InvalidInputError("make_replica_ensemble: need at least 2 replicas");
  if (n < 1) throw InvalidInputError("make_replica_ensemble: need at least 1 particle");
  if (!kernel.accepts(initial.space())) {
    throw InvalidInputError("make_replica_ensemble: kernel " + kernel.kind_name() +
                            " does not act on " + initial.describe() + " configurations");
  }

  std::vector<Configuration> runs(static_cast<std::size_t>(replicas));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(replicas));
  const auto worker = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      try {
        RandomStream rng(seed, sweep_substream(cell, kRunTag, r));
        const Configuration start = initial.draw(n, rng);
        runs[static_cast<std::size_t>(r)] = kernel.run(start, t, rng).config;
      } catch (...) {
        failures[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };

  const int workers = std::clamp(threads, 1, replicas);
  if (workers == 1) {
    worker(0, replicas);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (replicas + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(replicas, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (std::thread& th : pool) th.join();
  }
  // Report the lowest-index failure so thread count cannot change the error.
  for (const std::exception_ptr& p : failures) {
    if (p) std::rethrow_exception(p);
  }

  return ReplicaEnsemble::wrap(std::move(runs), kernel.kind_name(), t, seed, cell);
}

Estimate kac_pair_test(const ReplicaEnsemble& ensemble, const Feature& g1, const Feature& g2) {
  check_ensemble(ensemble, "kac_pair_test");
  if (ensemble.n < 2) throw InvalidInputError("kac_pair_test: needs at least 2 coordinates");

  const int r_count = ensemble.replica_count();
  const std::uint64_t n = static_cast<std::uint64_t>(ensemble.n);
  std::vector<double> cross(static_cast<std::size_t>(r_count));
  std::vector<double> first(static_cast<std::size_t>(r_count));
  std::vector<double> second(static_cast<std::size_t>(r_count));
  for (int r = 0; r < r_count; ++r) {
    const std::vector<Point> pts = sorted_points(ensemble.runs[static_cast<std::size_t>(r)]);
    RandomStream rng(ensemble.seed_base, sweep_substream(ensemble.cell, kPairTag, r));
    const std::uint64_t i = rng.uniform_below(n);
    std::uint64_t j = rng.uniform_below(n - 1);
    if (j >= i) ++j;
    const std::uint64_t a = rng.uniform_below(n);
    const std::uint64_t b = rng.uniform_below(n);
    cross[static_cast<std::size_t>(r)] =
        g1(pts[static_cast<std::size_t>(i)]) * g2(pts[static_cast<std::size_t>(j)]);
    first[static_cast<std::size_t>(r)] = g1(pts[static_cast<std::size_t>(a)]);
    second[static_cast<std::size_t>(r)] = g2(pts[static_cast<std::size_t>(b)]);
  }

  Estimate out;
  out.replicas = r_count;
  out.value = mean_of(cross) - mean_of(first) * mean_of(second);

  // Jackknife over replicas: rebuild the plug-in estimate with each replica
  // left out and rescale the spread of the leave-one-out values.
  const double sc = stable_sum(cross);
  const double sf = stable_sum(first);
  const double ss = stable_sum(second);
  const double rm1 = static_cast<double>(r_count - 1);
  std::vector<double> loo(static_cast<std::size_t>(r_count));
  for (int r = 0; r < r_count; ++r) {
    const std::size_t u = static_cast<std::size_t>(r);
    loo[u] = (sc - cross[u]) / rm1 - ((sf - first[u]) / rm1) * ((ss - second[u]) / rm1);
  }
  const double loo_mean = mean_of(loo);
  std::vector<double> sq(loo.size());
  for (std::size_t u = 0; u < loo.size(); ++u) {
    sq[u] = (loo[u] - loo_mean) * (loo[u] - loo_mean);
  }
  out.se = std::sqrt(rm1 / static_cast<double>(r_count) * stable_sum(sq));
  return out;
}

Estimate concentration_test(const ReplicaEnsemble& ensemble, const AtomicMeasure& reference,
                            const MetricOptions& options) {
  check_ensemble(ensemble, "concentration_test");
  const AtomicMeasure ref = reference.support_size() > options.bl_exact_cap
                                ? quantize_measure(reference, options.bl_exact_cap)
                                : reference;

  std::vector<double> dists(static_cast<std::size_t>(ensemble.replica_count()));
  for (int r = 0; r < ensemble.replica_count(); ++r) {
    const AtomicMeasure emp = empirical_measure(ensemble.runs[static_cast<std::size_t>(r)]);
    dists[static_cast<std::size_t>(r)] = bl_distance(emp, ref, options).value;
  }

  Estimate out;
  out.replicas = ensemble.replica_count();
  out.value = mean_of(dists);
  out.se = mean_stderr(dists, out.value);
  return out;
}

double marginal_product_distance(const ReplicaEnsemble& ensemble, int k,
                                 const AtomicMeasure& reference, const MetricOptions& options) {
  check_ensemble(ensemble, "marginal_product_distance");
  if (k < 1 || k > 3) throw InvalidInputError("marginal_product_distance: k must be 1, 2 or 3");
  if (ensemble.n < k) {
    throw InvalidInputError("marginal_product_distance: configurations shorter than k");
  }

  // Power support of the quantized reference stays within the exact cap.
  const int base_cap =
      static_cast<int>(std::floor(std::pow(options.bl_exact_cap, 1.0 / k) + 1e-9));
  const AtomicMeasure ref = reference.support_size() > base_cap
                                ? quantize_measure(reference, base_cap)
                                : reference;
  const AtomicMeasure ref_pow = product_power(ref, k);

  const int r_count = ensemble.replica_count();
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(r_count));
  std::vector<int> index(static_cast<std::size_t>(ensemble.n));
  for (int r = 0; r < r_count; ++r) {
    const std::vector<Point> pts = sorted_points(ensemble.runs[static_cast<std::size_t>(r)]);
    RandomStream rng(ensemble.seed_base,
                     sweep_substream(ensemble.cell, kMarginalTagBase + k, r));
    // Partial Fisher-Yates: a uniformly random injection of {1..k}.
    for (int i = 0; i < ensemble.n; ++i) index[static_cast<std::size_t>(i)] = i;
    std::vector<Point> slots;
    slots.reserve(static_cast<std::size_t>(k));
    for (int s = 0; s < k; ++s) {
      const std::uint64_t pick =
          s + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(ensemble.n - s)));
      std::swap(index[static_cast<std::size_t>(s)], index[static_cast<std::size_t>(pick)]);
      slots.push_back(pts[static_cast<std::size_t>(index[static_cast<std::size_t>(s)])]);
    }
    atoms.emplace_back(std::move(slots));
  }
  const std::vector<double> weights(static_cast<std::size_t>(r_count),
                                    1.0 / static_cast<double>(r_count));
  const AtomicMeasure marginal(std::move(atoms), weights);
  return bl_distance(marginal, ref_pow, options).value;
}

DiagnosticsReport propagation_sweep(const TransitionKernel& kernel, const InitialLaw& initial,
                                    const std::vector<int>& n_ladder, double t, int replicas,
                                    std::uint64_t seed, const AtomicMeasure& reference,
                                    int threads) {
  if (n_ladder.empty()) throw InvalidInputError("propagation_sweep: empty ladder");
  if (replicas < 2) throw InvalidInputError("propagation_sweep: need at least 2 replicas");

  const std::vector<Feature> dict = feature_dictionary_for(reference, reference);
  if (dict.empty()) throw InvalidInputError("propagation_sweep: no features for this space");
  const Feature& g = dict.front();

  DiagnosticsReport report;
  report.kernel = kernel.kind_name();
  report.modes = kernel.mode_string() + "; initial=" + initial.describe();
  report.t = t;
  report.seed = seed;
  report.replicas = replicas;

  for (std::size_t cell = 0; cell < n_ladder.size(); ++cell) {
    SweepRow row;
    row.n = n_ladder[cell];
    try {
      const ReplicaEnsemble ensemble = make_replica_ensemble(
          kernel, initial, row.n, t, replicas, seed, static_cast<std::uint64_t>(cell), threads);
      row.kac_cov = kac_pair_test(ensemble, g, g);
      row.concentration = concentration_test(ensemble, reference);
      row.marginal_k1 = marginal_product_distance(ensemble, 1, reference);
      if (row.n >= 2) row.marginal_k2 = marginal_product_distance(ensemble, 2, reference);
      row.failed = false;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      row.flags.push_back(std::string("error: ") + e.what());
    }
    report.ladder.push_back(std::move(row));
  }

  // No drift toward the reference across the ladder: flag the last cell.
  const SweepRow* first_ok = nullptr;
  SweepRow* last_ok = nullptr;
  for (SweepRow& row : report.ladder) {
    if (row.failed) continue;
    if (first_ok == nullptr) first_ok = &row;
    last_ok = &row;
  }
  if (first_ok != nullptr && last_ok != nullptr && first_ok != last_ok) {
    const double head = first_ok->concentration.value;
    const double tail = last_ok->concentration.value;
    if (tail > 0.05 && tail > 0.5 * head) {
      last_ok->flags.push_back("concentration-stalled");
    }
  }
  return report;
}

std::string DiagnosticsReport::to_json() const {
  nlohmann::json j;
  j["kernel"] = kernel;
  j["modes"] = modes;
  j["t"] = t;
  j["seed"] = seed;
  j["replicas"] = replicas;
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : ladder) {
    nlohmann::json r;
    r["n"] = row.n;
    r["flags"] = row.flags;
    if (!row.failed) {
      r["kac_cov"] = {{"est", row.kac_cov.value}, {"se", row.kac_cov.se}};
      r["concentration"] = {{"mean", row.concentration.value}, {"se", row.concentration.se}};
      r["marginal"] = {{"k1", row.marginal_k1}, {"k2", row.marginal_k2}};
    }
    rows.push_back(std::move(r));
  }
  j["ladder"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string DiagnosticsReport::to_csv() const {
  std::string out = "n,metric,value,stderr\n";
  for (const SweepRow& row : ladder) {
    if (row.failed) continue;
    const std::string n = std::to_string(row.n);
    out += n + ",kac_cov," + format_g(row.kac_cov.value) + "," + format_g(row.kac_cov.se) + "\n";
    out += n + ",concentration," + format_g(row.concentration.value) + "," +
           format_g(row.concentration.se) + "\n";
    out += n + ",marginal_k1," + format_g(row.marginal_k1) + ",\n";
    out += n + ",marginal_k2," + format_g(row.marginal_k2) + ",\n";
  }
  return out;
}

}  // namespace chaoslab
