#pragma once

#include <string>
#include <vector>

#include "dukf/random.hpp"
#include "dukf/sde_model.hpp"

namespace dukf {

/// y = H x + v, v ~ N(0, R), sampled every `interval` time units.
struct MeasurementModel {
  std::vector<double> h;
  double r = 0.0;
  double interval = 0.0;

  /// Checks r >= 0 and interval > 0. The filters additionally require r > 0.
  void validate() const;
  double project(std::span<const double> x) const;
};

struct MeasurementSeries {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  void validate() const;
};

MeasurementSeries observe(const Trajectory& traj, const MeasurementModel& mm, RandomStream& rng);

void write_measurements_csv(const std::string& path, const MeasurementSeries& series);
MeasurementSeries read_measurements_csv(const std::string& path);

}  // namespace dukf
