#include "chaoslab/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "chaoslab/errors.hpp"
#include "chaoslab/serialize.hpp"

namespace chaoslab {

namespace {

using nlohmann::json;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Appends to `errors` instead of throwing, so one pass reports every defect.
class Collector {
 public:
  explicit Collector(std::vector<std::string>& errors) : errors_(errors) {}

  void add(std::string message) { errors_.push_back(std::move(message)); }

  bool require_keys(const json& obj, const std::string& prefix,
                    const std::set<std::string>& known) {
    bool clean = true;
    for (const auto& item : obj.items())
      if (known.count(item.key()) == 0) {
        add("unknown key \"" + prefix + item.key() + "\"");
        clean = false;
      }
    return clean;
  }

  // Returns true when `key` exists and has the expected shape.
  bool number(const json& obj, const std::string& key, double& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_number()) {
      add("\"" + key + "\" must be a number");
      return false;
    }
    out = obj[key].get<double>();
    return true;
  }

  bool integer(const json& obj, const std::string& key, long long& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_number_integer()) {
      add("\"" + key + "\" must be an integer");
      return false;
    }
    out = obj[key].get<long long>();
    return true;
  }

  bool text(const json& obj, const std::string& key, std::string& out) {
    if (!obj.contains(key)) return false;
    if (!obj[key].is_string()) {
      add("\"" + key + "\" must be a string");
      return false;
    }
    out = obj[key].get<std::string>();
    return true;
  }

 private:
  std::vector<std::string>& errors_;
};

void parse_kernel(const json& spec, Collector& c, TransitionKernel& kernel, bool& ok) {
  ok = false;
  std::string kind;
  json params = json::object();
  if (spec.is_string()) {
    kind = spec.get<std::string>();
  } else if (spec.is_object()) {
    if (!spec.contains("kind") || !spec["kind"].is_string()) {
      c.add("\"kernel\" object needs a \"kind\" string");
      return;
    }
    kind = spec["kind"].get<std::string>();
    params = spec;
  } else {
    c.add("\"kernel\" must be a string or an object");
    return;
  }

  auto finish = [&](const std::set<std::string>& known) {
    return spec.is_string() || c.require_keys(params, "kernel.", known);
  };

  if (kind == "kac") {
    kernel.kind = TransitionKernel::Kind::Kac;
    double tau = 1.0;
    c.number(params, "tau", tau);
    if (!(tau > 0.0)) {
      c.add("\"kernel.tau\" must be positive");
      return;
    }
    kernel.tau = tau;
    ok = finish({"kind", "tau"});
  } else if (kind == "grunbaum") {
    kernel.kind = TransitionKernel::Kind::Grunbaum;
    std::string rate = "text", scheme = "stagewise";
    c.text(params, "rate", rate);
    c.text(params, "scheme", scheme);
    if (rate != "text" && rate != "inverse") {
      c.add("\"kernel.rate\" must be \"text\" or \"inverse\"");
      return;
    }
    if (scheme != "stagewise" && scheme != "gillespie") {
      c.add("\"kernel.scheme\" must be \"stagewise\" or \"gillespie\"");
      return;
    }
    kernel.grunbaum.inverse_rate = rate == "inverse";
    kernel.grunbaum.gillespie = scheme == "gillespie";
    ok = finish({"kind", "rate", "scheme"});
  } else if (kind == "mckean-vlasov") {
    kernel.kind = TransitionKernel::Kind::McKeanVlasov;
    std::string drift = "zero", sigma = "zero";
    double dt = 0.01;
    c.text(params, "drift", drift);
    c.text(params, "sigma", sigma);
    c.number(params, "dt", dt);
    try {
      kernel.drift = DriftKernel::parse(drift);
      kernel.sigma = SigmaKernel::parse(sigma);
    } catch (const Error& e) {
      c.add(e.what());
      return;
    }
    if (!(dt > 0.0)) {
      c.add("\"kernel.dt\" must be positive");
      return;
    }
    kernel.dt = dt;
    ok = finish({"kind", "drift", "sigma", "dt"});
  } else if (kind == "vlasov") {
    kernel.kind = TransitionKernel::Kind::Vlasov;
    std::string force = "zero";
    double dt = 0.01;
    c.text(params, "force", force);
    c.number(params, "dt", dt);
    try {
      kernel.force = ForceKernel::parse(force);
    } catch (const Error& e) {
      c.add(e.what());
      return;
    }
    if (!(dt > 0.0)) {
      c.add("\"kernel.dt\" must be positive");
      return;
    }
    kernel.dt = dt;
    ok = finish({"kind", "dt", "force"});
  } else if (kind == "counterexample") {
    kernel.kind = TransitionKernel::Kind::Counterexample;
    ok = finish({"kind"});
  } else {
    c.add("unknown kernel kind \"" + kind + "\"");
  }
}

void parse_reference(const json& spec, Collector& c, ReferenceSpec& ref, bool& ok) {
  ok = false;
  std::string kind;
  json params = json::object();
  if (spec.is_string()) {
    kind = spec.get<std::string>();
  } else if (spec.is_object()) {
    if (!spec.contains("kind") || !spec["kind"].is_string()) {
      c.add("\"reference\" object needs a \"kind\" string");
      return;
    }
    kind = spec["kind"].get<std::string>();
    params = spec;
  } else {
    c.add("\"reference\" must be a string or an object");
    return;
  }

  if (kind == "pde") {
    ref.kind = ReferenceSpec::Kind::Pde;
    long long grid = ref.grid;
    double dt = ref.dt;
    c.integer(params, "grid", grid);
    c.number(params, "dt", dt);
    if (grid < 8) {
      c.add("\"reference.grid\" must be at least 8");
      return;
    }
    if (!(dt > 0.0)) {
      c.add("\"reference.dt\" must be positive");
      return;
    }
    ref.grid = static_cast<int>(grid);
    ref.dt = dt;
    ok = spec.is_string() || c.require_keys(params, "reference.", {"kind", "grid", "dt"});
  } else if (kind == "large-n") {
    ref.kind = ReferenceSpec::Kind::LargeN;
    long long big_n = 0;
    c.integer(params, "big_n", big_n);
    if (big_n < 0 || big_n == 1) {
      c.add("\"reference.big_n\" must be >= 2 (or 0 for automatic)");
      return;
    }
    ref.big_n = static_cast<int>(big_n);
    ok = spec.is_string() || c.require_keys(params, "reference.", {"kind", "big_n"});
  } else if (kind == "explicit") {
    ref.kind = ReferenceSpec::Kind::Explicit;
    if (!params.contains("atoms")) {
      c.add("explicit reference needs an \"atoms\" measure document");
      return;
    }
    ref.atoms_json = params["atoms"].dump();
    try {
      const AtomicMeasure atoms = atomic_measure_from_json_string(ref.atoms_json);
      if (atoms.tuple_width() != 1) {
        c.add("\"reference.atoms\" must be a width-1 measure");
        return;
      }
    } catch (const std::exception& e) {
      c.add(std::string("\"reference.atoms\": ") + e.what());
      return;
    }
    ok = c.require_keys(params, "reference.", {"kind", "atoms"});
  } else {
    c.add("unknown reference kind \"" + kind + "\"");
  }
}

// The initial law's single-particle marginal as a width-1 measure the
// large-n reference can draw from; n feeds the 1/n bernoulli.
AtomicMeasure single_particle_measure(const InitialLaw& law, int cap, int n) {
  if (law.family != InitialLaw::Family::Mixture) return law.marginal.quantized(cap, n);
  std::vector<Atom> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < law.components.size(); ++i) {
    const AtomicMeasure part = law.components[i].quantized(cap, n);
    for (int a = 0; a < part.support_size(); ++a) {
      atoms.push_back(part.atom(a));
      weights.push_back(law.weights[i] * part.weight(a));
    }
  }
  return quantize_measure(AtomicMeasure(std::move(atoms), std::move(weights)), cap);
}

// Limit single-particle symbol distribution (P(0), P(1)) for the bernoulli
// family laws the occupancy table supports.
Eigen::VectorXd symbol_target(const InitialLaw& law) {
  const auto marginal_p = [](const SingleParticleLaw& m) {
    return m.kind == SingleParticleLaw::Kind::BernoulliOverN ? 0.0 : m.param;
  };
  double p = 0.0;
  if (law.family == InitialLaw::Family::Mixture) {
    for (std::size_t i = 0; i < law.components.size(); ++i)
      p += law.weights[i] * marginal_p(law.components[i]);
  } else {
    p = marginal_p(law.marginal);
  }
  Eigen::VectorXd out(2);
  out << 1.0 - p, p;
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string estimate_cell(const Estimate& e) {
  return fmt("%.4g", e.value) + "(" + fmt("%.2g", e.se) + ")";
}

}  // namespace

std::string ReferenceSpec::describe() const {
  switch (kind) {
    case Kind::Pde:
      return "pde(grid=" + std::to_string(grid) + ",dt=" + fmt("%g", dt) + ")";
    case Kind::LargeN:
      return big_n == 0 ? std::string("large-n(big_n=auto)")
                        : "large-n(big_n=" + std::to_string(big_n) + ")";
    case Kind::Explicit:
      return "explicit";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("document is not valid JSON: ") + e.what()});
  }

  std::vector<std::string> errors;
  Collector c(errors);
  ExperimentConfig config;

  if (!doc.is_object()) {
    c.add("top level must be an object");
    throw ConfigError(errors);
  }
  c.require_keys(doc, "", {"kernel", "initial", "n_ladder", "t", "replicas", "seed",
                           "diagnostics", "reference", "output"});

  bool kernel_ok = false;
  if (doc.contains("kernel"))
    parse_kernel(doc["kernel"], c, config.kernel, kernel_ok);
  else
    c.add("\"kernel\" is required");

  bool initial_ok = false;
  std::string initial_text;
  if (c.text(doc, "initial", initial_text)) {
    try {
      config.initial = InitialLaw::parse(initial_text);
      initial_ok = true;
    } catch (const Error& e) {
      c.add(e.what());
    }
  } else if (!doc.contains("initial")) {
    c.add("\"initial\" is required");
  }

  if (doc.contains("n_ladder")) {
    const json& ladder = doc["n_ladder"];
    if (!ladder.is_array()) {
      c.add("\"n_ladder\" must be an array of integers");
    } else {
      bool shape_ok = true;
      for (const json& v : ladder)
        if (!v.is_number_integer() || v.get<long long>() < 1) {
          c.add("\"n_ladder\" entries must be integers >= 1");
          shape_ok = false;
          break;
        }
      if (shape_ok) {
        for (const json& v : ladder) config.n_ladder.push_back(v.get<int>());
        if (config.n_ladder.size() < 3) c.add("\"n_ladder\" needs at least 3 entries");
        for (std::size_t i = 0; i + 1 < config.n_ladder.size(); ++i)
          if (config.n_ladder[i] >= config.n_ladder[i + 1]) {
            c.add("n_ladder not increasing");
            break;
          }
      }
    }
  } else {
    c.add("\"n_ladder\" is required");
  }

  if (doc.contains("t")) {
    double t = 0.0;
    if (c.number(doc, "t", t)) {
      if (t < 0.0)
        c.add("\"t\" must be nonnegative");
      else
        config.t = t;
    }
  } else {
    c.add("\"t\" is required");
  }

  long long replicas = config.replicas;
  if (c.integer(doc, "replicas", replicas) || !doc.contains("replicas")) {
    if (replicas < 2)
      c.add("\"replicas\" must be at least 2");
    else
      config.replicas = static_cast<int>(replicas);
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
      c.add("\"seed\" must be a nonnegative integer");
    else
      config.seed = doc["seed"].get<std::uint64_t>();
  } else {
    c.add("seed is required (no wall-clock default)");
  }

  std::string selection = "all";
  c.text(doc, "diagnostics", selection);
  if (selection == "all")
    config.diagnostics = DiagnosticsSelection::All;
  else if (selection == "sweep")
    config.diagnostics = DiagnosticsSelection::SweepOnly;
  else if (selection == "entropy")
    config.diagnostics = DiagnosticsSelection::EntropyOnly;
  else
    c.add("\"diagnostics\" must be \"all\", \"sweep\" or \"entropy\"");

  bool reference_ok = false;
  if (doc.contains("reference"))
    parse_reference(doc["reference"], c, config.reference, reference_ok);
  else
    reference_ok = true;  // defaults to automatic large-n

  if (doc.contains("output")) {
    const json& out = doc["output"];
    if (!out.is_object()) {
      c.add("\"output\" must be an object");
    } else {
      c.require_keys(out, "output.", {"json", "csv", "entropy_csv"});
      c.text(out, "json", config.output.report_json);
      c.text(out, "csv", config.output.report_csv);
      c.text(out, "entropy_csv", config.output.entropy_csv);
      if (config.output.report_json.empty() || config.output.report_csv.empty() ||
          config.output.entropy_csv.empty())
        c.add("output paths must be nonempty");
    }
  }

  // Cross-field checks need the parts above to have parsed.
  if (initial_ok && config.diagnostics == DiagnosticsSelection::EntropyOnly &&
      config.initial.space() != SpaceKind::Symbol)
    c.add("diagnostics \"entropy\" needs a finite symbol initial law, got " +
          config.initial.describe());
  if (kernel_ok && initial_ok && reference_ok &&
      config.reference.kind == ReferenceSpec::Kind::Pde) {
    if (config.kernel.kind != TransitionKernel::Kind::Kac &&
        config.kernel.kind != TransitionKernel::Kind::McKeanVlasov)
      c.add("pde reference needs a kac or mckean-vlasov kernel, got " +
            config.kernel.kind_name());
    if (config.initial.family == InitialLaw::Family::Mixture)
      c.add("pde reference needs a product or pure-atomic initial law");
    else if (config.initial.marginal.kind != SingleParticleLaw::Kind::Gaussian &&
             config.initial.marginal.kind != SingleParticleLaw::Kind::Uniform)
      c.add("pde reference needs a gaussian or uniform marginal, got " +
            config.initial.marginal.describe());
  }
  if (initial_ok && reference_ok && config.reference.kind == ReferenceSpec::Kind::Explicit) {
    const AtomicMeasure atoms = atomic_measure_from_json_string(config.reference.atoms_json);
    if (atoms.kind() != config.initial.space())
      c.add("explicit reference lives in a different space than the initial law");
  }

  if (!errors.empty()) throw ConfigError(errors);
  return config;
}

GridLaw1D resolve_reference_grid(const ExperimentConfig& config) {
  if (config.reference.kind != ReferenceSpec::Kind::Pde)
    throw InvalidInputError("reference " + config.reference.describe() + " has no grid form");
  const GridLaw1D f0 = grid_from_law(config.initial.marginal, config.reference.grid);
  switch (config.kernel.kind) {
    case TransitionKernel::Kind::Kac:
      return solve_kac_caricature(f0, config.t, config.kernel.tau, config.reference.dt);
    case TransitionKernel::Kind::McKeanVlasov:
      return solve_mckean_vlasov_fp1d(f0, config.t, config.kernel.drift, config.kernel.sigma,
                                      config.reference.dt);
    default:
      throw InvalidInputError("no limit-equation solver for kernel " +
                              config.kernel.kind_name());
  }
}

AtomicMeasure resolve_reference(const ExperimentConfig& config) {
  const int cap = MetricOptions{}.bl_exact_cap;
  switch (config.reference.kind) {
    case ReferenceSpec::Kind::Pde:
      return atomize(resolve_reference_grid(config));
    case ReferenceSpec::Kind::LargeN: {
      int big_n = config.reference.big_n;
      if (big_n == 0) {
        const int top = config.n_ladder.empty() ? 0 : config.n_ladder.back();
        big_n = std::max(1000, 4 * top);
      }
      const AtomicMeasure start = single_particle_measure(config.initial, cap, big_n);
      return reference_limit_by_large_n(config.kernel, start, config.t, big_n, config.seed);
    }
    case ReferenceSpec::Kind::Explicit:
      return atomic_measure_from_json_string(config.reference.atoms_json);
  }
  throw InvalidInputError("unreachable reference kind");
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 const std::string& format, int threads) {
  if (format != "json" && format != "csv" && format != "both")
    throw InvalidInputError("format must be json, csv or both");
  if (threads < 1) throw InvalidInputError("threads must be at least 1");

  ExperimentOutcome outcome;
  std::string summary;
  summary += "kernel " + config.kernel.mode_string() + "  t=" + fmt("%g", config.t) +
             "  seed=" + std::to_string(config.seed) +
             "  replicas=" + std::to_string(config.replicas) + "\n";
  summary += "initial " + config.initial.describe() + "\n";

  if (config.diagnostics != DiagnosticsSelection::EntropyOnly) {
    const AtomicMeasure reference = resolve_reference(config);
    summary += "reference " + config.reference.describe() + " (" +
               std::to_string(reference.support_size()) + " atoms)\n";
    outcome.report = propagation_sweep(config.kernel, config.initial, config.n_ladder,
                                       config.t, config.replicas, config.seed, reference,
                                       threads);
    outcome.sweep_ran = true;

    summary += "  n        kac_cov(se)        concentration(se)  k1         k2\n";
    for (const SweepRow& row : outcome.report.ladder) {
      char head[32];
      std::snprintf(head, sizeof(head), "  %-8d ", row.n);
      summary += head;
      if (row.failed) {
        summary += "error: " + row.error + "\n";
        outcome.exit_code = 2;
        continue;
      }
      char line[160];
      std::snprintf(line, sizeof(line), "%-18s %-18s %-10.4g %-10.4g",
                    estimate_cell(row.kac_cov).c_str(),
                    estimate_cell(row.concentration).c_str(), row.marginal_k1,
                    row.marginal_k2);
      summary += line;
      for (const std::string& flag : row.flags) summary += "  [" + flag + "]";
      summary += "\n";
    }
  }

  if (config.diagnostics != DiagnosticsSelection::SweepOnly &&
      config.initial.space() == SpaceKind::Symbol) {
    outcome.entropy = entropy_convergence_check(occupancy_family(config.initial),
                                                symbol_target(config.initial), config.n_ladder);
    outcome.entropy_ran = true;
    int ok_rows = 0;
    const EntropyRow* last = nullptr;
    for (const EntropyRow& row : outcome.entropy.rows) {
      if (row.failed) {
        outcome.exit_code = 2;
        continue;
      }
      ++ok_rows;
      last = &row;
    }
    summary += "entropy: target " + fmt("%.6g", outcome.entropy.target) + ", rows " +
               std::to_string(ok_rows) + "/" + std::to_string(outcome.entropy.rows.size()) +
               " ok";
    if (last != nullptr)
      summary += ", final gap " + fmt("%.3g", last->gap) + " (n=" + std::to_string(last->n) +
                 "), envelope C " + fmt("%.3g", outcome.entropy.envelope_constant) +
                 ", concentration " + (outcome.entropy.concentration_ok ? "ok" : "NOT ok");
    summary += "\n";
  }

  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  if (outcome.sweep_ran && (format == "json" || format == "both")) {
    const auto path = dir / config.output.report_json;
    write_file(path, outcome.report.to_json());
    outcome.files.push_back(path.string());
  }
  if (outcome.sweep_ran && (format == "csv" || format == "both")) {
    const auto path = dir / config.output.report_csv;
    write_file(path, outcome.report.to_csv());
    outcome.files.push_back(path.string());
  }
  if (outcome.entropy_ran && (format == "csv" || format == "both")) {
    const auto path = dir / config.output.entropy_csv;
    write_file(path, entropy_table_csv(outcome.entropy));
    outcome.files.push_back(path.string());
  }

  if (!outcome.files.empty()) {
    summary += "wrote";
    for (std::size_t i = 0; i < outcome.files.size(); ++i)
      summary += (i == 0 ? " " : ", ") + outcome.files[i];
    summary += "\n";
  }

  bool stalled = false;
  int stall_n = 0;
  if (outcome.sweep_ran)
    for (const SweepRow& row : outcome.report.ladder)
      for (const std::string& flag : row.flags)
        if (flag == "concentration-stalled") {
          stalled = true;
          stall_n = row.n;
        }
  if (outcome.entropy_ran && !outcome.entropy.concentration_ok) stalled = true;
  if (stalled) {
    summary += "non-chaotic output detected";
    if (stall_n > 0) summary += " (concentration-stalled at n=" + std::to_string(stall_n) + ")";
    summary += "\n";
  }

  outcome.summary = std::move(summary);
  return outcome;
}

}  // namespace chaoslab
