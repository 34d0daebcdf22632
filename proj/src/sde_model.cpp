#include "dukf/sde_model.hpp"

#include <cmath>

#include "dukf/csv.hpp"
#include "dukf/errors.hpp"

namespace dukf {

namespace {

double ipow(double base, int exponent) {
  double result = 1.0;
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

}  // namespace

double Monomial::evaluate(std::span<const double> x) const {
  double value = coefficient;
  for (std::size_t j = 0; j < exponents.size(); ++j) value *= ipow(x[j], exponents[j]);
  return value;
}

PolynomialSdeModel::PolynomialSdeModel(std::string name, std::size_t dim,
                                       std::vector<std::vector<Monomial>> drift,
                                       std::vector<double> diffusion_diag)
    : name_(std::move(name)), dim_(dim), drift_(std::move(drift)),
      diffusion_diag_(std::move(diffusion_diag)) {
  if (dim_ == 0) throw UnsupportedModelError("model dimension must be positive");
  if (drift_.size() != dim_) throw UnsupportedModelError("drift must have one monomial list per state");
  if (diffusion_diag_.size() != dim_) {
    throw UnsupportedModelError("diffusion diagonal must have one entry per state");
  }
  for (const auto& eq : drift_) {
    for (const auto& m : eq) {
      if (m.exponents.size() != dim_) {
        throw UnsupportedModelError("monomial exponent vector length differs from model dimension");
      }
      for (int e : m.exponents) {
        if (e < 0) throw UnsupportedModelError("negative exponent: drift must be polynomial");
      }
      if (!std::isfinite(m.coefficient)) throw UnsupportedModelError("non-finite drift coefficient");
    }
  }
  for (double q : diffusion_diag_) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw UnsupportedModelError("diffusion entries must be finite and >= 0");
  }
}

PolynomialSdeModel van_der_pol(double epsilon, double q11, double q22) {
  std::vector<std::vector<Monomial>> drift{
      {{1.0, {0, 1}}},
      {{epsilon, {0, 1}}, {-epsilon, {2, 1}}, {-1.0, {1, 0}}},
  };
  return PolynomialSdeModel("van_der_pol", 2, std::move(drift), {q11, q22});
}

void drift_eval_into(const PolynomialSdeModel& model, std::span<const double> x,
                     std::span<double> out) {
  if (x.size() != model.dim() || out.size() != model.dim()) {
    throw ContractViolation("state length " + std::to_string(x.size()) +
                            " does not match model dimension " + std::to_string(model.dim()));
  }
  for (std::size_t i = 0; i < model.dim(); ++i) {
    double sum = 0.0;
    for (const auto& m : model.drift(i)) sum += m.evaluate(x);
    out[i] = sum;
  }
}

StateVector drift_eval(const PolynomialSdeModel& model, std::span<const double> x) {
  StateVector out(model.dim());
  drift_eval_into(model, x, out);
  return out;
}

void euler_maruyama_advance(const PolynomialSdeModel& model, std::span<double> x, double dt,
                            std::size_t steps, RandomStream& rng) {
  if (!(dt > 0.0)) throw ContractViolation("integrator step must be positive");
  const std::size_t d = model.dim();
  if (x.size() != d) throw ContractViolation("state length does not match model dimension");
  StateVector drift(d);
  StateVector noise_scale(d);
  for (std::size_t i = 0; i < d; ++i) noise_scale[i] = std::sqrt(model.diffusion_diag()[i] * dt);

  for (std::size_t s = 0; s < steps; ++s) {
    drift_eval_into(model, x, drift);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] += drift[i] * dt;
      if (noise_scale[i] > 0.0) x[i] += noise_scale[i] * rng.normal();
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(x[i])) {
        throw BlowUpError("Euler-Maruyama state became non-finite after " + std::to_string(s + 1) +
                          " steps (component " + std::to_string(i + 1) + ")");
      }
    }
  }
}

StateVector euler_maruyama_step(const PolynomialSdeModel& model, std::span<const double> x,
                                double dt, RandomStream& rng) {
  StateVector next(x.begin(), x.end());
  euler_maruyama_advance(model, next, dt, 1, rng);
  return next;
}

std::size_t whole_steps(double span_length, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("integrator step must be positive");
  if (span_length < 0.0) throw ContractViolation("negative time span");
  const double q = span_length / dt;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(q));
}

Trajectory simulate_truth(const PolynomialSdeModel& model, std::span<const double> x0, double dt,
                          double t_end, RandomStream& rng) {
  if (!(dt > 0.0)) throw ContractViolation("integrator step must be positive");
  if (t_end < 0.0) throw ContractViolation("t_end must be >= 0");
  if (x0.size() != model.dim()) throw ContractViolation("initial state length does not match model dimension");
  const std::size_t steps = whole_steps(t_end, dt);
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(steps + 1);
  StateVector x(x0.begin(), x0.end());
  traj.states.push_back(x);
  for (std::size_t s = 0; s < steps; ++s) {
    euler_maruyama_advance(model, x, dt, 1, rng);
    traj.states.push_back(x);
  }
  return traj;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  CsvTable table;
  table.header.push_back("t");
  const std::size_t d = traj.states.empty() ? 0 : traj.states.front().size();
  for (std::size_t i = 0; i < d; ++i) table.header.push_back("x" + std::to_string(i + 1));
  table.rows.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::vector<double> row{traj.time_at(k)};
    row.insert(row.end(), traj.states[k].begin(), traj.states[k].end());
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

Trajectory read_trajectory_csv(const std::string& path) {
  auto table = read_csv(path);
  if (table.rows.empty()) throw ValidationError(path + ": trajectory has no rows");
  const auto ct = table.column("t");
  Trajectory traj;
  traj.t0 = table.rows.front()[ct];
  if (table.rows.size() > 1) {
    // Nominal step from the full span; differencing adjacent rows is noisier.
    traj.dt = (table.rows.back()[ct] - traj.t0) / static_cast<double>(table.rows.size() - 1);
  }
  for (const auto& row : table.rows) {
    StateVector x;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != ct) x.push_back(row[i]);
    }
    traj.states.push_back(std::move(x));
  }
  return traj;
}

}  // namespace dukf
