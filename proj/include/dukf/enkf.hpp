#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dukf/gaussian_moments.hpp"
#include "dukf/measurement.hpp"
#include "dukf/random.hpp"
#include "dukf/sde_model.hpp"

namespace dukf {

struct EnkfConfig {
  std::size_t ensemble_size = 10;
  double integrator_dt = 1e-4;
  GaussianBelief initial;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Ensemble {
  std::vector<Eigen::Vector2d> members;

  std::size_t size() const { return members.size(); }
  Eigen::Vector2d mean() const;
  /// Unbiased (divisor n - 1) sample covariance.
  Eigen::Matrix2d covariance() const;
};

/// Draws n members from N(belief.mean, belief.cov); the covariance may be singular.
Ensemble sample_ensemble(const GaussianBelief& belief, std::size_t n, RandomStream& rng);

/// Advances every member by Euler-Maruyama over `interval`. BlowUpError names the member.
Ensemble enkf_forecast(const Ensemble& ensemble, const PolynomialSdeModel& model, double dt,
                       double interval, RandomStream& rng);

struct EnkfAnalysis {
  Ensemble analysis;
  Eigen::Vector2d forecast_mean;
  Eigen::Matrix2d forecast_cov;
  Eigen::Vector2d gain;
  double sampled_r = 0.0;
};

/**
 * @brief Perturbed-observation update with sampled noise statistics.
 *
 * Draws v_i ~ N(0, R) per member, estimates P^f and R-hat with divisor n - 1,
 * forms K = P^f H^T (H P^f H^T + R-hat)^{-1} and moves every member by
 * K (y + v_i - H x_i).
 */
EnkfAnalysis enkf_assimilate(const Ensemble& forecast, double y, const MeasurementModel& mm,
                             RandomStream& rng);

}  // namespace dukf
