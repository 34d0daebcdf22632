#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dukf/dukf_filter.hpp"
#include "dukf/experiment.hpp"
#include "dukf/filter_output.hpp"
#include "dukf/reaction_network.hpp"

namespace dukf {

/// Writes truth.csv (`t,x1,x2`) and measurements.csv (`t,y`) into `out`.
void cmd_simulate_truth(const ExperimentConfig& config, const std::filesystem::path& out);

/// Writes network.json into `out` and returns the derived system.
DualSystem cmd_derive_dual(const ExperimentConfig& config, const std::filesystem::path& out);

/// File name of table c<index+1> inside a table directory.
std::string table_file_name(std::size_t index);

/// Builds and saves the five moment tables c1.json ... c5.json into `out`.
/// Returns the truncation warnings (strict mode throws instead).
std::vector<std::string> cmd_gen_dual_tables(const ExperimentConfig& config, const std::filesystem::path& out,
                                             bool strict, std::ostream* log = nullptr);

DualTableSet load_table_set(const std::filesystem::path& dir, const std::string& expected_model_hash);

struct RunInputs {
  std::filesystem::path measurements;
  std::filesystem::path tables_dir;  ///< DuKF only
};

/// Runs one filter and writes filter_output.csv, forecast.csv and manifest.json into `out`.
FilterOutput cmd_run(FilterKind kind, const ExperimentConfig& config, const RunInputs& inputs,
                     const std::filesystem::path& out);

/// Compares run directories against the truth trajectory; writes metrics.json,
/// plot_states.dat and plot_covariance.dat into `out` and returns the metrics.
nlohmann::json cmd_compare(const std::vector<std::filesystem::path>& run_dirs,
                           const std::filesystem::path& truth_csv,
                           const std::optional<std::filesystem::path>& measurements_csv,
                           const std::filesystem::path& out);

}  // namespace dukf
