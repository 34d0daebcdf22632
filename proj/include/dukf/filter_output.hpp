#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "dukf/dukf_filter.hpp"
#include "dukf/enkf.hpp"
#include "dukf/measurement.hpp"
#include "dukf/sde_model.hpp"

namespace dukf {

enum class FilterKind { Enkf, Dukf };

std::string to_string(FilterKind kind);
FilterKind parse_filter_kind(const std::string& text);

struct FilterStep {
  double t = 0.0;
  GaussianBelief forecast;
  GaussianBelief posterior;
  Eigen::Vector2d gain = Eigen::Vector2d::Zero();
};

struct FilterOutput {
  FilterKind kind = FilterKind::Enkf;
  double t0 = 0.0;
  GaussianBelief initial;
  std::vector<FilterStep> steps;
  std::vector<std::string> warnings;
  nlohmann::json provenance;
};

struct DukfConfig {
  GaussianBelief initial;
  DukfOptions options;
};

/// EnKF over all measurement times, starting from an ensemble drawn at t0.
FilterOutput run_enkf(const MeasurementSeries& measurements, const PolynomialSdeModel& model,
                      const MeasurementModel& mm, const EnkfConfig& config, double t0 = 0.0);

/// DuKF over all measurement times; each step uses r_ts = (tau_k - tau_{k-1}) / tau_tilde.
FilterOutput run_dukf(const MeasurementSeries& measurements, const DualTableSet& tables,
                      const MeasurementModel& mm, const DukfConfig& config, double t0 = 0.0);

/// Posterior rows `t,mean1,mean2,p11,p12,p22,k1,k2`; the first row is the initial belief.
void write_filter_output_csv(const std::filesystem::path& path, const FilterOutput& output);
/// Forecast rows `t,mean1,mean2,p11,p12,p22`, one per measurement time.
void write_forecast_csv(const std::filesystem::path& path, const FilterOutput& output);

}  // namespace dukf
