#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaoslab/configuration.hpp"
#include "chaoslab/features.hpp"
#include "chaoslab/initial_laws.hpp"
#include "chaoslab/metrics.hpp"
#include "chaoslab/processes.hpp"

namespace chaoslab {

// A point estimate with its sampling error and the replica count behind it.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
  int replicas = 0;
};

// R independent runs of one (kernel, n, t) cell. All estimators below first
// put each replica into canonical coordinate order and only then apply their
// stream-drawn indices, so every diagnostic is exactly invariant under
// permuting coordinates within a replica: a uniformly random index tuple of
// the sorted configuration has the same law as one of the raw configuration.
struct ReplicaEnsemble {
  std::vector<Configuration> runs;
  std::string kernel_kind;
  double t = 0.0;
  int n = 0;
  std::uint64_t seed_base = 0;
  std::uint64_t cell = 0;  // substream block the ensemble was drawn in

  int replica_count() const { return static_cast<int>(runs.size()); }

  // Validates R >= 2 and that every run has the same size and variant.
  static ReplicaEnsemble wrap(std::vector<Configuration> runs, std::string kernel_kind,
                              double t, std::uint64_t seed_base, std::uint64_t cell = 0);
};

// Stream index layout shared by the ensemble builder and the estimators:
// replica in the low 20 bits, a 4-bit role tag, the sweep cell above them.
// Role 0 drives the kernel run, role 1 the covariance pair draws, roles
// 1 + k the k-marginal injections. Keeping roles disjoint means adding or
// removing one estimator never shifts another's randomness.
std::uint64_t sweep_substream(std::uint64_t cell, int tag, int replica);

// Draws R initial configurations and runs the kernel to time t, one
// substream per replica (parallelizable; results are ordered by replica
// index, so thread count never changes the output).
ReplicaEnsemble make_replica_ensemble(const TransitionKernel& kernel, const InitialLaw& initial,
                                      int n, double t, int replicas, std::uint64_t seed,
                                      std::uint64_t cell = 0, int threads = 1);

// Covariance clue for chaoticity: estimates
//   E[g1(s_1) g2(s_2)] - E[g1(s_1)] E[g2(s_2)]
// from one uniformly random ordered pair per replica (cross term) and two
// independent single-coordinate draws (product term), with a jackknife
// standard error. Exchangeable chaotic ensembles drive this to 0; mixtures
// leave a variance-sized gap. Degenerate ensembles where every replica
// produces identical samples difference out to exactly 0.
Estimate kac_pair_test(const ReplicaEnsemble& ensemble, const Feature& g1, const Feature& g2);

// Mean and standard error over replicas of bl_distance(empirical(run),
// reference). A reference wider than the exact-metric cap is quantized down
// to it first, so every replica faces the same comparison point.
Estimate concentration_test(const ReplicaEnsemble& ensemble, const AtomicMeasure& reference,
                            const MetricOptions& options = {});

// Dudley distance between the empirical k-marginal (one uniformly random
// injection per replica) and reference^(x)k under the max tuple metric.
// k in {1, 2, 3}; the reference is quantized to floor(cap^(1/k)) atoms
// before powering so the product support stays within the exact-metric cap.
double marginal_product_distance(const ReplicaEnsemble& ensemble, int k,
                                 const AtomicMeasure& reference,
                                 const MetricOptions& options = {});

// One ladder cell of a sweep report. A cell that threw carries the message
// in `error` plus an "error: ..." flag and leaves its estimates at zero.
struct SweepRow {
  int n = 0;
  bool failed = false;
  std::string error;
  Estimate kac_cov;
  Estimate concentration;
  double marginal_k1 = 0.0;
  double marginal_k2 = 0.0;
  std::vector<std::string> flags;
};

struct DiagnosticsReport {
  std::string kernel;
  std::string modes;
  double t = 0.0;
  std::uint64_t seed = 0;
  int replicas = 0;
  std::vector<SweepRow> ladder;

  // Schema: {kernel, t, ladder:[{n, kac_cov:{est, se}, concentration:
  // {mean, se}, marginal:{k1, k2}, flags:[...]}], seed, modes, replicas}.
  // Keys are emitted sorted, so equal reports serialize byte-identically.
  std::string to_json() const;
  // One row per (n, metric): "n,metric,value,stderr". Failed cells are
  // omitted; marginal rows leave the stderr column empty.
  std::string to_csv() const;
};

// Full propagation experiment: for every n in the ladder, build an ensemble
// (cell index = position in the ladder), then compute the pair covariance
// (g1 = g2 = first dictionary feature for the reference's space), the
// concentration against `reference`, and the k = 1, 2 marginal distances.
// A cell that throws is recorded and the sweep continues. When at least two
// cells succeeded and the last one's concentration mean stays above 0.05
// and above half of the first's, the last row is flagged
// "concentration-stalled": the ensemble shows no drift toward the reference.
DiagnosticsReport propagation_sweep(const TransitionKernel& kernel, const InitialLaw& initial,
                                    const std::vector<int>& n_ladder, double t, int replicas,
                                    std::uint64_t seed, const AtomicMeasure& reference,
                                    int threads = 1);

}  // namespace chaoslab
