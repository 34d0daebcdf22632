// Command-line front end: data generation, dual-table pre-calculation,
// filter runs and comparison against the hidden truth.
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dukf/commands.hpp"
#include "dukf/errors.hpp"
#include "dukf/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment config (defaults give the Van der Pol scenario)");
  cmd->add_option("--seed", opts.seed, "Master seed overriding the config");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_flag("--strict", opts.strict, "Escalate truncation warnings to errors");
}

dukf::ExperimentConfig resolve_config(const CommonOptions& opts) {
  auto config = opts.config_path.empty() ? dukf::ExperimentConfig{} : dukf::load_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  config.validate();
  return config;
}

fs::path out_dir(const CommonOptions& opts, const dukf::ExperimentConfig& config, const fs::path& fallback) {
  return opts.out.empty() ? fs::path(config.output_dir) / fallback : fs::path(opts.out);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Duality-based and ensemble Kalman filtering for polynomial SDEs"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* simulate = app.add_subcommand("simulate-truth", "Simulate the hidden trajectory and noisy measurements");
  add_common(simulate, common);

  auto* derive = app.add_subcommand("derive-dual", "Derive the dual birth-death network and write network.json");
  add_common(derive, common);
  bool print_network = false;
  derive->add_flag("--print", print_network, "Also print the network JSON to stdout");

  auto* gen = app.add_subcommand("gen-dual-tables", "Simulate the dual process and write tables c1..c5");
  add_common(gen, common);
  std::optional<std::uint64_t> n_paths;
  std::optional<unsigned> workers;
  std::optional<double> tau_tilde;
  gen->add_option("--paths", n_paths, "Paths per table (overrides dual.n_paths)");
  gen->add_option("--workers", workers, "Worker threads (overrides dual.workers)");
  gen->add_option("--tau-tilde", tau_tilde, "Dual horizon (overrides dual.tau_tilde)");

  auto* run = app.add_subcommand("run", "Run a filter over a measurement series");
  add_common(run, common);
  std::string filter_name;
  std::string measurements_path;
  std::string tables_path;
  std::optional<std::size_t> ensemble_size;
  run->add_option("--filter", filter_name, "Filter kind")->required()->check(CLI::IsMember({"enkf", "dukf"}));
  run->add_option("--measurements", measurements_path, "Measurement CSV (default <output_dir>/measurements.csv)");
  run->add_option("--tables", tables_path, "Dual table directory (default <output_dir>/tables)");
  run->add_option("--ensemble-size", ensemble_size, "EnKF ensemble size (overrides filter.ensemble_size)");

  auto* compare = app.add_subcommand("compare", "Score filter runs against the truth and emit plot data");
  add_common(compare, common);
  std::vector<std::string> run_dirs;
  std::string truth_path;
  std::string compare_measurements;
  compare->add_option("--outputs", run_dirs, "Run directories (or filter_output.csv files)");
  compare->add_option("--truth", truth_path, "Truth CSV (default <output_dir>/truth.csv)");
  compare->add_option("--measurements", compare_measurements, "Measurement CSV to score as a baseline");

  auto* schema = app.add_subcommand("schema", "Print the JSON schema of the config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    Stopwatch clock;
    if (*schema) {
      std::cout << dukf::config_schema().dump(2) << "\n";
      return 0;
    }
    auto config = resolve_config(common);
    const fs::path base(config.output_dir);

    if (*simulate) {
      const auto out = out_dir(common, config, "");
      dukf::cmd_simulate_truth(config, out);
      std::cerr << "wrote " << (out / "truth.csv").string() << " and " << (out / "measurements.csv").string()
                << " in " << clock.seconds() << " s\n";
    } else if (*derive) {
      const auto out = out_dir(common, config, "");
      const auto system = dukf::cmd_derive_dual(config, out);
      if (print_network) std::cout << dukf::to_json(system).dump(2) << "\n";
      std::cerr << "wrote " << (out / "network.json").string() << " (" << system.network.reactions.size()
                << " reactions, model hash " << dukf::model_hash(system) << ")\n";
    } else if (*gen) {
      if (n_paths) config.dual.n_paths = *n_paths;
      if (workers) config.dual.workers = *workers;
      if (tau_tilde) config.dual.tau_tilde = *tau_tilde;
      config.validate();
      const auto out = out_dir(common, config, "tables");
      const auto warnings = dukf::cmd_gen_dual_tables(config, out, common.strict, &std::cerr);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      std::cerr << "tables written to " << out.string() << " in " << clock.seconds() << " s\n";
    } else if (*run) {
      const auto kind = dukf::parse_filter_kind(filter_name);
      if (ensemble_size) config.filter.ensemble_size = *ensemble_size;
      config.validate();
      dukf::RunInputs inputs;
      inputs.measurements = measurements_path.empty() ? base / "measurements.csv" : fs::path(measurements_path);
      inputs.tables_dir = tables_path.empty() ? base / "tables" : fs::path(tables_path);
      const auto out = out_dir(common, config, filter_name);
      const auto output = dukf::cmd_run(kind, config, inputs, out);
      for (const auto& w : output.warnings) std::cerr << "warning: " << w << "\n";
      std::cerr << filter_name << ": " << output.steps.size() << " steps in " << clock.seconds() << " s, output in "
                << out.string() << "\n";
    } else if (*compare) {
      std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
      const fs::path truth = truth_path.empty() ? base / "truth.csv" : fs::path(truth_path);
      std::optional<fs::path> meas;
      if (!compare_measurements.empty()) meas = fs::path(compare_measurements);
      const auto out = out_dir(common, config, "compare");
      const auto metrics = dukf::cmd_compare(dirs, truth, meas, out);
      std::cout << metrics.dump(2) << "\n";
    }
    return 0;
  } catch (const dukf::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const dukf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
