#include "dukf/enkf.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dukf/errors.hpp"

namespace dukf {

void EnkfConfig::validate() const {
  if (ensemble_size < 2) throw ConfigurationError("EnKF ensemble size must be >= 2");
  if (!(integrator_dt > 0.0)) throw ConfigurationError("EnKF integrator step must be > 0");
  if (!initial.mean.allFinite() || !initial.cov.allFinite()) {
    throw ConfigurationError("EnKF initial belief must be finite");
  }
}

Eigen::Vector2d Ensemble::mean() const {
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  for (const auto& x : members) m += x;
  return m / static_cast<double>(members.size());
}

Eigen::Matrix2d Ensemble::covariance() const {
  if (members.size() < 2) throw ContractViolation("covariance needs at least two members");
  const Eigen::Vector2d m = mean();
  Eigen::Matrix2d p = Eigen::Matrix2d::Zero();
  for (const auto& x : members) {
    const Eigen::Vector2d e = x - m;
    p += e * e.transpose();
  }
  return p / static_cast<double>(members.size() - 1);
}

Ensemble sample_ensemble(const GaussianBelief& belief, std::size_t n, RandomStream& rng) {
  const Eigen::Matrix2d sym = 0.5 * (belief.cov + belief.cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sym);
  const Eigen::Vector2d scale = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix2d root = eig.eigenvectors() * scale.asDiagonal();
  Ensemble ens;
  ens.members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    ens.members.push_back(belief.mean + root * Eigen::Vector2d(z1, z2));
  }
  return ens;
}

Ensemble enkf_forecast(const Ensemble& ensemble, const PolynomialSdeModel& model, double dt,
                       double interval, RandomStream& rng) {
  if (model.dim() != 2) throw ContractViolation("the ensemble filter handles two-state models");
  if (interval < 0.0) throw ContractViolation("forecast interval must be >= 0");
  const std::size_t steps = whole_steps(interval, dt);
  Ensemble out = ensemble;
  if (steps == 0) return out;
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    try {
      euler_maruyama_advance(model, std::span<double>(out.members[i].data(), 2), dt, steps, rng);
    } catch (const BlowUpError& e) {
      throw BlowUpError("ensemble member " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

EnkfAnalysis enkf_assimilate(const Ensemble& forecast, double y, const MeasurementModel& mm,
                             RandomStream& rng) {
  const std::size_t n = forecast.size();
  if (n < 2) throw ContractViolation("EnKF assimilation needs at least two members");
  if (mm.h.size() != 2) throw ContractViolation("H must have two entries");
  const Eigen::RowVector2d h(mm.h[0], mm.h[1]);
  const double sd = std::sqrt(mm.r);

  std::vector<double> v(n);
  for (auto& vi : v) vi = sd * rng.normal();
  double v_mean = 0.0;
  for (double vi : v) v_mean += vi;
  v_mean /= static_cast<double>(n);
  double r_hat = 0.0;
  for (double vi : v) r_hat += (vi - v_mean) * (vi - v_mean);
  r_hat /= static_cast<double>(n - 1);

  EnkfAnalysis out;
  out.forecast_mean = forecast.mean();
  out.forecast_cov = forecast.covariance();
  out.sampled_r = r_hat;
  const double innovation_var = (h * out.forecast_cov * h.transpose()).value() + r_hat;
  if (!(innovation_var > 0.0)) {
    throw NumericalError("EnKF innovation variance is not positive");
  }
  out.gain = out.forecast_cov * h.transpose() / innovation_var;

  out.analysis.members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = forecast.members[i];
    out.analysis.members.push_back(x + out.gain * (y + v[i] - h.dot(x)));
  }
  return out;
}

}  // namespace dukf
