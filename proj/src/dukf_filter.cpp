#include "dukf/dukf_filter.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "dukf/csv.hpp"
#include "dukf/errors.hpp"

namespace dukf {

void DualTableSet::validate() const {
  for (std::size_t c = 0; c < tables.size(); ++c) {
    const auto& t = tables[c];
    const auto& want = kMomentConditions[c];
    if (t.initial_n != std::vector<int>(want.begin(), want.end())) {
      throw IncompatibleTableError("table c" + std::to_string(c + 1) +
                                   " has the wrong initial population");
    }
    if (t.tau_tilde != tables[0].tau_tilde) throw IncompatibleTableError("tables use different horizons");
    if (t.model_hash != tables[0].model_hash) throw IncompatibleTableError("tables belong to different models");
  }
}

double clamp_covariance(Eigen::Matrix2d& cov, double floor) {
  cov = 0.5 * (cov + cov.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d lambda = eig.eigenvalues();
  const double min_before = lambda.minCoeff();
  if (min_before < floor) {
    const Eigen::Vector2d lifted = lambda.cwiseMax(floor);
    cov = eig.eigenvectors() * lifted.asDiagonal() * eig.eigenvectors().transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
  }
  return min_before;
}

GaussianBelief dukf_forecast(const GaussianBelief& belief, const DualTableSet& tables, double r_ts,
                             const DukfOptions& options, ForecastDiagnostics* diagnostics) {
  MomentContext ctx(belief, options.order_cap);
  std::array<MomentEstimate, 5> m{};
  for (std::size_t c = 0; c < 5; ++c) m[c] = gaussian_moment(tables.tables[c], ctx, r_ts);

  ForecastDiagnostics local;
  auto& diag = diagnostics ? *diagnostics : local;
  diag.moments = m;
  for (std::size_t c = 0; c < 5; ++c) {
    if (!(m[c].std_error <= options.max_std_error)) {
      throw UnusableEstimateError("moment c" + std::to_string(c + 1) + " standard error " +
                                  format_real(m[c].std_error) + " exceeds the bound " +
                                  format_real(options.max_std_error));
    }
  }

  GaussianBelief out;
  out.mean = Eigen::Vector2d(m[0].value, m[1].value);
  out.cov(0, 0) = m[2].value - m[0].value * m[0].value;
  out.cov(1, 1) = m[3].value - m[1].value * m[1].value;
  out.cov(0, 1) = m[4].value - m[0].value * m[1].value;
  out.cov(1, 0) = out.cov(0, 1);
  if (!out.mean.allFinite() || !out.cov.allFinite()) {
    throw NumericalError("duality forecast produced non-finite moments");
  }

  diag.min_eigenvalue_before_clamp = clamp_covariance(out.cov, options.cov_floor);
  diag.clamped = diag.min_eigenvalue_before_clamp < options.cov_floor;
  if (diag.min_eigenvalue_before_clamp < -options.clamp_warning) {
    diag.warnings.push_back("forecast covariance had eigenvalue " +
                            format_real(diag.min_eigenvalue_before_clamp) + " before clamping");
  }
  return out;
}

DukfAnalysis dukf_assimilate(const GaussianBelief& forecast, double y, const MeasurementModel& mm) {
  if (mm.h.size() != 2) throw ContractViolation("H must have two entries");
  if (!(mm.r > 0.0)) throw ConfigurationError("the Kalman update needs R > 0");
  const Eigen::RowVector2d h(mm.h[0], mm.h[1]);
  const double innovation_var = (h * forecast.cov * h.transpose()).value() + mm.r;

  DukfAnalysis out;
  out.gain = forecast.cov * h.transpose() / innovation_var;
  out.posterior.mean = forecast.mean + out.gain * (y - h.dot(forecast.mean));
  out.posterior.cov = (Eigen::Matrix2d::Identity() - out.gain * h) * forecast.cov;
  out.posterior.cov = 0.5 * (out.posterior.cov + out.posterior.cov.transpose()).eval();
  return out;
}

}  // namespace dukf
