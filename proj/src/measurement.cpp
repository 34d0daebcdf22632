#include "dukf/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "dukf/csv.hpp"
#include "dukf/errors.hpp"

namespace dukf {

void MeasurementModel::validate() const {
  if (h.empty()) throw ConfigurationError("measurement map H is empty");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigurationError("measurement variance R must be >= 0");
  if (!(interval > 0.0) || !std::isfinite(interval)) {
    throw ConfigurationError("measurement interval must be > 0");
  }
}

double MeasurementModel::project(std::span<const double> x) const {
  if (x.size() != h.size()) throw ContractViolation("H length does not match state dimension");
  double y = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) y += h[i] * x[i];
  return y;
}

void MeasurementSeries::validate() const {
  if (times.size() != values.size()) throw ValidationError("measurement times/values length mismatch");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ValidationError("measurement times must be strictly increasing");
  }
}

MeasurementSeries observe(const Trajectory& traj, const MeasurementModel& mm, RandomStream& rng) {
  mm.validate();
  if (traj.states.empty()) throw ContractViolation("empty trajectory");
  if (traj.states.front().size() != mm.h.size()) {
    throw ContractViolation("H length does not match trajectory dimension");
  }
  const double ratio = mm.interval / traj.dt;
  const double nearest = std::round(ratio);
  if (nearest < 1.0 || std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigurationError("measurement interval " + format_real(mm.interval) +
                             " is not an integer multiple of the integrator step " +
                             format_real(traj.dt));
  }
  const auto stride = static_cast<std::size_t>(nearest);
  const double sd = std::sqrt(mm.r);
  MeasurementSeries series;
  for (std::size_t idx = stride; idx < traj.states.size(); idx += stride) {
    series.times.push_back(traj.t0 + static_cast<double>(idx / stride) * mm.interval);
    double y = mm.project(traj.states[idx]);
    if (mm.r > 0.0) y += sd * rng.normal();
    series.values.push_back(y);
  }
  return series;
}

void write_measurements_csv(const std::string& path, const MeasurementSeries& series) {
  CsvTable table{{"t", "y"}, {}};
  for (std::size_t k = 0; k < series.size(); ++k) table.rows.push_back({series.times[k], series.values[k]});
  write_csv(path, table);
}

MeasurementSeries read_measurements_csv(const std::string& path) {
  auto table = read_csv(path);
  const auto ct = table.column("t");
  const auto cy = table.column("y");
  MeasurementSeries series;
  for (const auto& row : table.rows) {
    series.times.push_back(row[ct]);
    series.values.push_back(row[cy]);
  }
  series.validate();
  return series;
}

}  // namespace dukf
