#include "dukf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "dukf/csv.hpp"
#include "dukf/errors.hpp"
#include "dukf/random.hpp"

namespace dukf {

namespace fs = std::filesystem;

void cmd_simulate_truth(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  const auto model = config.sde_model();
  RandomStream truth_rng(stream_seed(config, SeedStream::Truth));
  RandomStream noise_rng(stream_seed(config, SeedStream::Measurement));
  const auto traj = simulate_truth(model, config.truth.x0, config.truth.dt, config.truth.t_end, truth_rng);
  const auto series = observe(traj, config.measurement, noise_rng);
  fs::create_directories(out);
  write_trajectory_csv((out / "truth.csv").string(), traj);
  write_measurements_csv((out / "measurements.csv").string(), series);
}

DualSystem cmd_derive_dual(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  auto system = derive_dual(config.sde_model());
  write_file(out / "network.json", to_json(system).dump(2) + "\n");
  return system;
}

std::string table_file_name(std::size_t index) { return "c" + std::to_string(index + 1) + ".json"; }

std::vector<std::string> cmd_gen_dual_tables(const ExperimentConfig& config, const fs::path& out, bool strict,
                                             std::ostream* log) {
  config.validate();
  const auto system = derive_dual(config.sde_model());
  std::vector<std::string> warnings;
  for (std::size_t c = 0; c < kMomentConditions.size(); ++c) {
    TableBuildOptions options;
    options.n_paths = config.dual.n_paths;
    options.caps = config.dual.caps;
    options.seed = stream_seed(config, SeedStream::DualTableBase, c);
    options.workers = config.dual.workers;
    options.chunk_size = config.dual.chunk_size;
    options.max_truncated_fraction = config.dual.max_truncated_fraction;
    options.strict = strict;
    const auto& init = kMomentConditions[c];
    std::vector<std::string> table_warnings;
    auto table = build_dual_table(system, init, config.dual.tau_tilde, options, &table_warnings);
    for (auto& w : table_warnings) warnings.push_back(table_file_name(c) + ": " + w);
    save_table(table, out / table_file_name(c));
    if (log) {
      *log << table_file_name(c) << ": " << table.n_paths << " paths, " << table.entries.size()
           << " entries, " << table.truncated_paths << " truncated, effective sample size "
           << table.effective_sample_size() << "\n";
    }
  }
  return warnings;
}

DualTableSet load_table_set(const fs::path& dir, const std::string& expected_model_hash) {
  DualTableSet set;
  for (std::size_t c = 0; c < set.tables.size(); ++c) {
    set.tables[c] = load_table(dir / table_file_name(c), expected_model_hash);
  }
  set.validate();
  return set;
}

namespace {

nlohmann::json file_record(const fs::path& path) {
  return {{"path", path.generic_string()}, {"fnv1a", fnv1a_hex(read_file(path))}};
}

}  // namespace

FilterOutput cmd_run(FilterKind kind, const ExperimentConfig& config, const RunInputs& inputs, const fs::path& out) {
  config.validate();
  if (!fs::exists(inputs.measurements)) {
    throw ValidationError("measurements file '" + inputs.measurements.string() + "' does not exist");
  }
  const auto measurements = read_measurements_csv(inputs.measurements.string());

  nlohmann::json manifest;
  manifest["command"] = "run";
  manifest["filter"] = to_string(kind);
  manifest["config"] = to_json(config);
  manifest["inputs"]["measurements"] = file_record(inputs.measurements);

  FilterOutput output;
  if (kind == FilterKind::Enkf) {
    EnkfConfig enkf;
    enkf.ensemble_size = config.filter.ensemble_size;
    enkf.integrator_dt = config.filter.integrator_dt;
    enkf.initial = config.filter.initial;
    enkf.seed = stream_seed(config, SeedStream::Enkf);
    output = run_enkf(measurements, config.sde_model(), config.measurement, enkf);
  } else {
    if (inputs.tables_dir.empty() || !fs::is_directory(inputs.tables_dir)) {
      throw ValidationError("dual table directory '" + inputs.tables_dir.string() + "' does not exist");
    }
    const auto hash = model_hash(derive_dual(config.sde_model()));
    const auto tables = load_table_set(inputs.tables_dir, hash);
    nlohmann::json records = nlohmann::json::array();
    for (std::size_t c = 0; c < tables.tables.size(); ++c) {
      records.push_back(file_record(inputs.tables_dir / table_file_name(c)));
    }
    manifest["inputs"]["tables"] = std::move(records);
    output = run_dukf(measurements, tables, config.measurement, DukfConfig{config.filter.initial, config.filter.dukf});
  }
  manifest["provenance"] = output.provenance;
  manifest["warnings"] = output.warnings;

  fs::create_directories(out);
  write_filter_output_csv(out / "filter_output.csv", output);
  write_forecast_csv(out / "forecast.csv", output);
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return output;
}

namespace {

struct Aligner {
  const Trajectory& truth;

  std::size_t index_of(double t) const {
    const double q = (t - truth.t0) / truth.dt;
    const double nearest = std::round(q);
    if (nearest < 0.0 || nearest > static_cast<double>(truth.states.size() - 1) ||
        std::abs(truth.time_at(static_cast<std::size_t>(nearest)) - t) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw ValidationError("time " + format_real(t) + " does not lie on the truth grid");
    }
    return static_cast<std::size_t>(nearest);
  }
};

struct Errors {
  double sum_sq1 = 0.0;
  double sum_sq2 = 0.0;
  std::size_t n = 0;
};

std::vector<std::vector<double>> sorted_rows(const CsvTable& table, std::size_t time_col) {
  auto rows = table.rows;
  std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) { return a[time_col] < b[time_col]; });
  return rows;
}

void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::string s = "#";
  for (const auto& h : header) s += " " + h;
  s += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ' ';
      s += format_real(row[i]);
    }
    s += '\n';
  }
  write_file(path, s);
}

}  // namespace

nlohmann::json cmd_compare(const std::vector<fs::path>& run_dirs, const fs::path& truth_csv,
                           const std::optional<fs::path>& measurements_csv, const fs::path& out) {
  if (run_dirs.empty() && !measurements_csv) throw ValidationError("compare needs at least one input");
  const auto truth = read_trajectory_csv(truth_csv.string());
  if (truth.states.front().size() != 2) throw ValidationError("truth trajectory must have columns t,x1,x2");
  Aligner align{truth};
  nlohmann::json metrics;
  metrics["truth"] = file_record(truth_csv);

  struct Run {
    std::string label;
    std::vector<std::vector<double>> posterior;  // t,mean1,mean2,p11,p12,p22,k1,k2
    std::map<double, std::vector<double>> forecast;
  };
  std::vector<Run> runs;
  for (const auto& dir : run_dirs) {
    Run run;
    run.label = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    const fs::path output_csv = fs::is_directory(dir) ? dir / "filter_output.csv" : dir;
    const auto table = read_csv(output_csv);
    const std::vector<std::string> cols{"t", "mean1", "mean2", "p11", "p12", "p22", "k1", "k2"};
    std::vector<std::size_t> idx;
    for (const auto& c : cols) idx.push_back(table.column(c));
    for (const auto& row : sorted_rows(table, idx[0])) {
      std::vector<double> r;
      for (auto i : idx) r.push_back(row[i]);
      run.posterior.push_back(std::move(r));
    }
    const fs::path forecast_csv = output_csv.parent_path() / "forecast.csv";
    if (fs::exists(forecast_csv)) {
      const auto ft = read_csv(forecast_csv);
      const auto t_col = ft.column("t");
      const auto p12_col = ft.column("p12");
      const auto p11_col = ft.column("p11");
      const auto p22_col = ft.column("p22");
      for (const auto& row : ft.rows) run.forecast[row[t_col]] = {row[p11_col], row[p12_col], row[p22_col]};
    }
    Errors err;
    for (const auto& r : run.posterior) {
      const auto k = align.index_of(r[0]);
      if (k == 0) continue;  // the initial belief is not an estimate
      const auto& x = truth.states[k];
      err.sum_sq1 += (r[1] - x[0]) * (r[1] - x[0]);
      err.sum_sq2 += (r[2] - x[1]) * (r[2] - x[1]);
      ++err.n;
    }
    if (err.n == 0) throw ValidationError("run '" + run.label + "' has no estimates after the initial time");
    const double n = static_cast<double>(err.n);
    metrics["runs"][run.label] = {{"n", err.n},
                                  {"mse_x1", err.sum_sq1 / n},
                                  {"mse_x2", err.sum_sq2 / n},
                                  {"rmse_x1", std::sqrt(err.sum_sq1 / n)},
                                  {"rmse_x2", std::sqrt(err.sum_sq2 / n)},
                                  {"source", file_record(output_csv)}};
    runs.push_back(std::move(run));
  }

  if (measurements_csv) {
    auto series = read_measurements_csv(measurements_csv->string());
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const auto& x = truth.states[align.index_of(series.times[k])];
      sum_sq += (series.values[k] - x[1]) * (series.values[k] - x[1]);
    }
    const double n = static_cast<double>(std::max<std::size_t>(series.size(), 1));
    metrics["measurements"] = {{"n", series.size()},
                               {"mse_vs_truth_x2", sum_sq / n},
                               {"rmse_vs_truth_x2", std::sqrt(sum_sq / n)},
                               {"source", file_record(*measurements_csv)}};
  }

  fs::create_directories(out);
  write_file(out / "metrics.json", metrics.dump(2) + "\n");

  if (!runs.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> state_header{"t", "truth_x1", "truth_x2"};
    std::vector<std::string> cov_header{"t"};
    for (const auto& run : runs) {
      state_header.push_back(run.label + "_x1");
      state_header.push_back(run.label + "_x2");
      cov_header.push_back(run.label + "_p12");
      cov_header.push_back(run.label + "_trace");
      cov_header.push_back(run.label + "_forecast_p12");
    }
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> lines;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      for (const auto& row : runs[r].posterior) {
        auto& [state_row, cov_row] = lines[row[0]];
        if (state_row.empty()) {
          const auto& x = truth.states[align.index_of(row[0])];
          state_row = {row[0], x[0], x[1]};
          state_row.resize(3 + 2 * runs.size(), nan);
          cov_row = {row[0]};
          cov_row.resize(1 + 3 * runs.size(), nan);
        }
        state_row[3 + 2 * r] = row[1];
        state_row[4 + 2 * r] = row[2];
        cov_row[1 + 3 * r] = row[4];
        cov_row[2 + 3 * r] = row[3] + row[5];
        auto f = runs[r].forecast.find(row[0]);
        if (f != runs[r].forecast.end()) cov_row[3 + 3 * r] = f->second[1];
      }
    }
    std::vector<std::vector<double>> state_rows;
    std::vector<std::vector<double>> cov_rows;
    for (auto& [t, pair] : lines) {
      state_rows.push_back(pair.first);
      cov_rows.push_back(pair.second);
    }
    write_columns(out / "plot_states.dat", state_header, state_rows);
    write_columns(out / "plot_covariance.dat", cov_header, cov_rows);
  }
  return metrics;
}

}  // namespace dukf
