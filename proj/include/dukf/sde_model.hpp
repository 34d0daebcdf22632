#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dukf/random.hpp"

namespace dukf {

using StateVector = std::vector<double>;

/// c * prod_j x_j^{exponents[j]}
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;

  double evaluate(std::span<const double> x) const;
};

/**
 * @brief SDE dx_i = f_i(x) dt + sqrt(Q_ii) dW_i with polynomial drift.
 *
 * The same monomial list drives the Euler-Maruyama integrator and the dual
 * birth-death derivation. Diffusion is constant and diagonal; nothing else
 * can be expressed, which is what keeps the derived operator normal-ordered.
 */
class PolynomialSdeModel {
 public:
  PolynomialSdeModel(std::string name, std::size_t dim,
                     std::vector<std::vector<Monomial>> drift,
                     std::vector<double> diffusion_diag);

  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::vector<Monomial>& drift(std::size_t i) const { return drift_.at(i); }
  const std::vector<std::vector<Monomial>>& drift() const { return drift_; }
  const std::vector<double>& diffusion_diag() const { return diffusion_diag_; }

 private:
  std::string name_;
  std::size_t dim_;
  std::vector<std::vector<Monomial>> drift_;
  std::vector<double> diffusion_diag_;
};

/// dx1 = x2 dt + w1, dx2 = (eps (1 - x1^2) x2 - x1) dt + w2.
PolynomialSdeModel van_der_pol(double epsilon, double q11, double q22);

StateVector drift_eval(const PolynomialSdeModel& model, std::span<const double> x);

/// Allocation-free variant used by the integrators; `out` must have length dim.
void drift_eval_into(const PolynomialSdeModel& model, std::span<const double> x,
                     std::span<double> out);

StateVector euler_maruyama_step(const PolynomialSdeModel& model, std::span<const double> x,
                                double dt, RandomStream& rng);

/// Advances `x` in place by `steps` Euler-Maruyama steps. Throws BlowUpError
/// as soon as a component becomes non-finite.
void euler_maruyama_advance(const PolynomialSdeModel& model, std::span<double> x, double dt,
                            std::size_t steps, RandomStream& rng);

/// Number of whole integrator steps covering `span_length`, tolerant to the
/// usual decimal rounding (0.2 / 1e-4 is not exactly 2000 in binary).
std::size_t whole_steps(double span_length, double dt);

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<StateVector> states;

  double time_at(std::size_t index) const { return t0 + static_cast<double>(index) * dt; }
  double t_end() const { return time_at(states.size() - 1); }
};

Trajectory simulate_truth(const PolynomialSdeModel& model, std::span<const double> x0, double dt,
                          double t_end, RandomStream& rng);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace dukf
