#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dukf/dual_table.hpp"
#include "dukf/gaussian_moments.hpp"
#include "dukf/measurement.hpp"

namespace dukf {

/// Initial populations (n0, n1, n2) of the five tables, in the order
/// E[x1], E[x2], E[x1^2], E[x2^2], E[x1 x2].
inline constexpr std::array<std::array<int, 3>, 5> kMomentConditions{{
    {0, 1, 0},
    {0, 0, 1},
    {0, 2, 0},
    {0, 0, 2},
    {0, 1, 1},
}};

/// The five pre-computed tables a forecast needs.
struct DualTableSet {
  std::array<DualTable, 5> tables;

  /// Checks the initial populations, a common horizon and a common model hash.
  void validate() const;
  double tau_tilde() const { return tables[0].tau_tilde; }
  const std::string& model_hash() const { return tables[0].model_hash; }
};

struct DukfOptions {
  double cov_floor = 1e-10;
  /// Negative eigenvalues larger than this in magnitude are reported.
  double clamp_warning = 1e-3;
  /// Any moment standard error above this makes the forecast unusable.
  double max_std_error = std::numeric_limits<double>::infinity();
  int order_cap = MomentContext::kDefaultOrderCap;
};

struct ForecastDiagnostics {
  std::array<MomentEstimate, 5> moments{};
  double min_eigenvalue_before_clamp = 0.0;
  bool clamped = false;
  std::vector<std::string> warnings;
};

/// Symmetrizes and lifts eigenvalues below `floor` to `floor`. Returns the
/// smallest eigenvalue seen before the repair.
double clamp_covariance(Eigen::Matrix2d& cov, double floor);

/**
 * @brief Moment-matched Gaussian forecast over tau = r_ts * tau_tilde.
 *
 * The first two moments of the propagated distribution come from the duality
 * relation evaluated on the five tables; no sample paths of the SDE are drawn.
 */
GaussianBelief dukf_forecast(const GaussianBelief& belief, const DualTableSet& tables, double r_ts,
                             const DukfOptions& options = {}, ForecastDiagnostics* diagnostics = nullptr);

struct DukfAnalysis {
  GaussianBelief posterior;
  Eigen::Vector2d gain;
};

/// Kalman update with the exact measurement variance; covariance (I - K H) P, then symmetrized.
DukfAnalysis dukf_assimilate(const GaussianBelief& forecast, double y, const MeasurementModel& mm);

}  // namespace dukf
