#include "dukf/filter_output.hpp"

#include "dukf/csv.hpp"
#include "dukf/errors.hpp"

namespace dukf {

std::string to_string(FilterKind kind) { return kind == FilterKind::Enkf ? "enkf" : "dukf"; }

FilterKind parse_filter_kind(const std::string& text) {
  if (text == "enkf") return FilterKind::Enkf;
  if (text == "dukf") return FilterKind::Dukf;
  throw ValidationError("unknown filter '" + text + "' (expected enkf or dukf)");
}

namespace {

void check_times(const MeasurementSeries& measurements, double t0) {
  measurements.validate();
  if (!measurements.empty() && !(measurements.times.front() > t0)) {
    throw ValidationError("first measurement time must be after the initial time");
  }
}

}  // namespace

FilterOutput run_enkf(const MeasurementSeries& measurements, const PolynomialSdeModel& model,
                      const MeasurementModel& mm, const EnkfConfig& config, double t0) {
  config.validate();
  mm.validate();
  if (!(mm.r > 0.0)) throw ConfigurationError("the Kalman update needs R > 0");
  check_times(measurements, t0);

  FilterOutput out;
  out.kind = FilterKind::Enkf;
  out.t0 = t0;
  out.initial = config.initial;
  out.provenance = {{"filter", "enkf"},
                    {"ensemble_size", config.ensemble_size},
                    {"integrator_dt", config.integrator_dt},
                    {"seed", config.seed}};

  RandomStream init_rng(config.seed, 0);
  RandomStream forecast_rng(config.seed, 1);
  RandomStream noise_rng(config.seed, 2);
  Ensemble ens = sample_ensemble(config.initial, config.ensemble_size, init_rng);

  double previous = t0;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const double tk = measurements.times[k];
    ens = enkf_forecast(ens, model, config.integrator_dt, tk - previous, forecast_rng);
    auto analysis = enkf_assimilate(ens, measurements.values[k], mm, noise_rng);
    ens = std::move(analysis.analysis);

    FilterStep step;
    step.t = tk;
    step.forecast = {analysis.forecast_mean, analysis.forecast_cov};
    step.posterior = {ens.mean(), ens.covariance()};
    step.gain = analysis.gain;
    out.steps.push_back(step);
    previous = tk;
  }
  return out;
}

FilterOutput run_dukf(const MeasurementSeries& measurements, const DualTableSet& tables,
                      const MeasurementModel& mm, const DukfConfig& config, double t0) {
  tables.validate();
  mm.validate();
  check_times(measurements, t0);

  FilterOutput out;
  out.kind = FilterKind::Dukf;
  out.t0 = t0;
  out.initial = config.initial;
  out.provenance = {{"filter", "dukf"},
                    {"tau_tilde", tables.tau_tilde()},
                    {"model_hash", tables.model_hash()}};
  nlohmann::json table_info = nlohmann::json::array();
  for (const auto& t : tables.tables) {
    table_info.push_back({{"initial_n", t.initial_n}, {"n_paths", t.n_paths}, {"seed", t.seed},
                          {"truncated_paths", t.truncated_paths}});
  }
  out.provenance["tables"] = std::move(table_info);

  GaussianBelief belief = config.initial;
  double previous = t0;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const double tk = measurements.times[k];
    const double r_ts = (tk - previous) / tables.tau_tilde();
    if (r_ts > 1.0 + 1e-9) {
      throw ValidationError("measurement interval " + format_real(tk - previous) +
                            " exceeds the dual table horizon " + format_real(tables.tau_tilde()));
    }
    ForecastDiagnostics diag;
    auto forecast = dukf_forecast(belief, tables, std::min(r_ts, 1.0), config.options, &diag);
    for (auto& w : diag.warnings) out.warnings.push_back("t=" + format_real(tk) + ": " + w);
    auto analysis = dukf_assimilate(forecast, measurements.values[k], mm);
    belief = analysis.posterior;

    FilterStep step;
    step.t = tk;
    step.forecast = forecast;
    step.posterior = belief;
    step.gain = analysis.gain;
    out.steps.push_back(step);
    previous = tk;
  }
  return out;
}

void write_filter_output_csv(const std::filesystem::path& path, const FilterOutput& output) {
  CsvTable table{{"t", "mean1", "mean2", "p11", "p12", "p22", "k1", "k2"}, {}};
  const auto& b0 = output.initial;
  table.rows.push_back({output.t0, b0.mean(0), b0.mean(1), b0.cov(0, 0), b0.cov(0, 1), b0.cov(1, 1), 0.0, 0.0});
  for (const auto& s : output.steps) {
    const auto& b = s.posterior;
    table.rows.push_back({s.t, b.mean(0), b.mean(1), b.cov(0, 0), b.cov(0, 1), b.cov(1, 1), s.gain(0), s.gain(1)});
  }
  write_csv(path, table);
}

void write_forecast_csv(const std::filesystem::path& path, const FilterOutput& output) {
  CsvTable table{{"t", "mean1", "mean2", "p11", "p12", "p22"}, {}};
  for (const auto& s : output.steps) {
    const auto& b = s.forecast;
    table.rows.push_back({s.t, b.mean(0), b.mean(1), b.cov(0, 0), b.cov(0, 1), b.cov(1, 1)});
  }
  write_csv(path, table);
}

}  // namespace dukf
