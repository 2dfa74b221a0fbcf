#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "chaoslab/diagnostics.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/experiment.hpp"
#include "chaoslab/meanfield.hpp"
#include "chaoslab/random_stream.hpp"
#include "chaoslab/serialize.hpp"

namespace {

using namespace chaoslab;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "both";
  int threads = 0;  // 0 = one worker per core
  long long seed_override = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment description (JSON)")->required();
  cmd->add_option("--out", args.out_dir, "directory for output files");
  cmd->add_option("--format", args.format, "which reports to write")
      ->check(CLI::IsMember({"json", "csv", "both"}));
  cmd->add_option("--threads", args.threads, "worker threads (default: all cores)");
  cmd->add_option("--seed", args.seed_override, "override the seed in the config");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig config = parse_config(slurp(args.config_path));
  if (args.seed_override >= 0) config.seed = static_cast<std::uint64_t>(args.seed_override);
  return config;
}

int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

nlohmann::json slot_json(const Point& p) {
  switch (p.kind()) {
    case SpaceKind::Scalar:
      return p.scalar_value();
    case SpaceKind::Symbol:
      return p.symbol_value();
    case SpaceKind::Velocity3: {
      const Eigen::Vector3d v = p.velocity3_value();
      return nlohmann::json::array({v[0], v[1], v[2]});
    }
    case SpaceKind::Phase: {
      nlohmann::json pos = nlohmann::json::array(), vel = nlohmann::json::array();
      const Eigen::VectorXd x = p.phase_position();
      const Eigen::VectorXd v = p.phase_velocity();
      for (Eigen::Index i = 0; i < x.size(); ++i) pos.push_back(x[i]);
      for (Eigen::Index i = 0; i < v.size(); ++i) vel.push_back(v[i]);
      return nlohmann::json{{"position", pos}, {"velocity", vel}};
    }
  }
  throw InvalidInputError("slot_json: unknown kind");
}

// One trajectory at the smallest ladder size, dumped as a JSON document so
// single runs can be inspected before paying for a full sweep.
int run_simulate(const CommonArgs& args) {
  const ExperimentConfig config = load_config(args);
  const int n = config.n_ladder.front();
  RandomStream rng(config.seed, sweep_substream(0, 0, 0));
  const Configuration start = config.initial.draw(n, rng);
  const RunResult run = config.kernel.run(start, config.t, rng);

  nlohmann::json out;
  out["kernel"] = config.kernel.kind_name();
  out["mode"] = config.kernel.mode_string();
  out["space"] = space_kind_name(run.config.kind());
  out["n"] = n;
  out["t"] = config.t;
  out["seed"] = config.seed;
  out["events"] = run.events;
  out["frozen"] = run.frozen;
  nlohmann::json points = nlohmann::json::array();
  for (int i = 0; i < run.config.n(); ++i) points.push_back(slot_json(run.config[i]));
  out["points"] = std::move(points);

  const std::filesystem::path path = std::filesystem::path(args.out_dir) / "configuration.json";
  write_text(path, out.dump(2) + "\n");
  std::cout << "kernel " << config.kernel.mode_string() << "  n=" << n << "  t=" << config.t
            << "  events=" << run.events << (run.frozen ? "  frozen" : "") << "\n"
            << "wrote " << path.string() << "\n";
  return 0;
}

int run_sweep(const CommonArgs& args) {
  const ExperimentConfig config = load_config(args);
  const ExperimentOutcome outcome =
      run_experiment(config, args.out_dir, args.format, effective_threads(args.threads));
  std::cout << outcome.summary;
  return outcome.exit_code;
}

int run_entropy(const CommonArgs& args) {
  ExperimentConfig config = load_config(args);
  if (config.initial.space() != SpaceKind::Symbol)
    throw InvalidInputError("entropy needs a finite symbol initial law, got " +
                            config.initial.describe());
  config.diagnostics = DiagnosticsSelection::EntropyOnly;
  const ExperimentOutcome outcome =
      run_experiment(config, args.out_dir, args.format, effective_threads(args.threads));
  std::cout << outcome.summary;
  return outcome.exit_code;
}

// Materializes the limiting law the sweep would compare against, without
// running any ensembles.
int run_limit(const CommonArgs& args) {
  const ExperimentConfig config = load_config(args);
  const AtomicMeasure measure = resolve_reference(config);
  const std::filesystem::path dir(args.out_dir);
  std::vector<std::string> files;
  if (args.format == "json" || args.format == "both") {
    const auto path = dir / "reference.json";
    write_text(path, to_json_string(measure, 2) + "\n");
    files.push_back(path.string());
  }
  if ((args.format == "csv" || args.format == "both") &&
      config.reference.kind == ReferenceSpec::Kind::Pde) {
    const auto path = dir / "reference.csv";
    write_text(path, grid_csv(resolve_reference_grid(config)));
    files.push_back(path.string());
  }
  std::cout << "reference " << config.reference.describe() << "  atoms="
            << measure.support_size() << "\n";
  if (!files.empty()) {
    std::cout << "wrote";
    for (std::size_t i = 0; i < files.size(); ++i)
      std::cout << (i == 0 ? " " : ", ") << files[i];
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interacting-particle simulations and propagation-of-chaos diagnostics"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory and dump the state");
  CLI::App* sweep = app.add_subcommand("sweep", "run the configured diagnostics ladder");
  CLI::App* entropy = app.add_subcommand("entropy", "specific-entropy ladder for symbol laws");
  CLI::App* limit = app.add_subcommand("limit", "materialize the reference law");
  for (CLI::App* cmd : {simulate, sweep, entropy, limit}) add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(args);
    if (sweep->parsed()) return run_sweep(args);
    if (entropy->parsed()) return run_entropy(args);
    if (limit->parsed()) return run_limit(args);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
