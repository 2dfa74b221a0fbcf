#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaoslab/diagnostics.hpp"
#include "chaoslab/entropy.hpp"
#include "chaoslab/initial_laws.hpp"
#include "chaoslab/meanfield.hpp"
#include "chaoslab/processes.hpp"

namespace chaoslab {

// Where an experiment's comparison point comes from:
//   pde       solve the kernel's limit equation (kac, mckean-vlasov only)
//             on `grid` cells with step `dt`, then atomize
//   large-n   one kernel run with big_n particles, empirical measure
//             quantized to the metric cap; big_n = 0 picks
//             max(1000, 4 * max ladder n)
//   explicit  atoms given inline as a measure document
struct ReferenceSpec {
  enum class Kind { Pde, LargeN, Explicit };
  Kind kind = Kind::LargeN;
  int grid = 256;
  double dt = 0.01;
  int big_n = 0;
  std::string atoms_json;

  std::string describe() const;
};

// File names for the report writers, joined under the output directory.
struct OutputPaths {
  std::string report_json = "report.json";
  std::string report_csv = "report.csv";
  std::string entropy_csv = "entropy.csv";
};

// Which analysis families run_experiment executes. The entropy ladder only
// exists on finite symbol spaces; selecting it for anything else is a
// validation error.
enum class DiagnosticsSelection { All, SweepOnly, EntropyOnly };

struct ExperimentConfig {
  TransitionKernel kernel;
  InitialLaw initial;
  std::vector<int> n_ladder;  // strictly increasing, length >= 3
  double t = 0.0;
  int replicas = 100;
  std::uint64_t seed = 0;  // mandatory in the document; no wall-clock default
  DiagnosticsSelection diagnostics = DiagnosticsSelection::All;
  ReferenceSpec reference;
  OutputPaths output;
};

// Parses and validates a JSON experiment document. Collects every validation
// problem (unknown keys by name, missing seed, non-increasing ladders, bad
// kernel or law strings, ...) and throws one ConfigError listing all of
// them; only a document that fails to parse at all short-circuits. Defaults:
// tau = 1, replicas = 100, diagnostics = "all", reference = large-n (auto
// size), output = report.json / report.csv / entropy.csv.
ExperimentConfig parse_config(const std::string& text);

// Materializes the configured reference as a width-1 measure: solves the
// limit equation, runs the one large-n realization, or parses the explicit
// atoms. The sweep's estimators quantize further when they must.
AtomicMeasure resolve_reference(const ExperimentConfig& config);

// The solved limit-equation grid behind a pde reference; throws for the
// other reference kinds and for kernels without a grid solver.
GridLaw1D resolve_reference_grid(const ExperimentConfig& config);

struct ExperimentOutcome {
  bool sweep_ran = false;
  DiagnosticsReport report;
  bool entropy_ran = false;
  EntropyTable entropy;
  std::vector<std::string> files;  // paths written, in write order
  std::string summary;             // one-screen text, ends with a newline
  int exit_code = 0;               // 0 clean, 2 when any ladder cell failed
};

// Runs the selected diagnostics, writes the report files named by the config
// under out_dir (format: "json", "csv" or "both"), and assembles the summary.
// Identical configs produce byte-identical files. Filesystem problems throw
// IoError; per-cell failures are isolated into their rows and surface only
// through exit_code 2.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 const std::string& format = "both", int threads = 1);

}  // namespace chaoslab
